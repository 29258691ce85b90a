#include <stdio.h>
#include "prs.h"

int main(void) {
    PrsSurface *s = NULL;
    PrsPoisson *p = NULL;
    size_t hp[3];
    if (prs_surface_new("sn", 3, NULL, NULL, NULL, &s) != PRS_STATUS_OK) return 1;
    if (prs_poisson_new(s, "a0=0,c0=1,c1=0,c2=0", &p) != PRS_STATUS_OK) return 1;
    if (prs_poisson_cohomology(p, hp) != PRS_STATUS_OK) return 1;
    printf("HP = (%zu, %zu, %zu)\n", hp[0], hp[1], hp[2]);
    if (prs_poisson_new(s, "a0=1", &p) != PRS_STATUS_OK) printf("error: %s\n", prs_last_error());
    prs_poisson_free(p);
    prs_surface_free(s);
    return 0;
}
