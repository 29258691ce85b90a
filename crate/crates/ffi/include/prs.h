#ifndef PRS_H
#define PRS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PrsStatus {
  PRS_STATUS_OK = 0,
  PRS_STATUS_NULL_POINTER = 1,
  PRS_STATUS_INVALID_UTF8 = 2,
  PRS_STATUS_INVALID_PARAMETERS = 3,
  PRS_STATUS_ORDER_ONE_POLE = 4,
  PRS_STATUS_UNTRUSTED_WINDOW = 5,
  PRS_STATUS_ILL_FORMED_SECTION = 6,
  PRS_STATUS_SINGULAR_TRANSITION = 7,
  PRS_STATUS_FRAME_MISMATCH = 8,
  PRS_STATUS_INCONSISTENT_FAMILY = 9,
  PRS_STATUS_PARSE = 10,
  PRS_STATUS_ARITY = 11,
  PRS_STATUS_INVALID_STRUCTURE = 12,
  PRS_STATUS_PANIC = 13,
} PrsStatus;

typedef enum PrsSheaf {
  PRS_SHEAF_THETA = 0,
  PRS_SHEAF_WEDGE2_THETA = 1,
} PrsSheaf;

typedef enum PrsVerdict {
  PRS_VERDICT_OBSTRUCTED = 0,
  PRS_VERDICT_UNOBSTRUCTED = 1,
  PRS_VERDICT_INCONCLUSIVE = 2,
} PrsVerdict;

/**
 * A Poisson structure on a surface.
 */
typedef struct PrsPoisson PrsPoisson;

/**
 * A ruled surface together with its default truncation.
 */
typedef struct PrsSurface PrsSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Owned by the library.
 */
const char *prs_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void prs_string_free(char *s);

/**
 * Creates a surface. `family` is one of `s0`, `twisted`, `sn`, `a0`, `am1`;
 * `n` is used by `sn`, `t0` by `twisted`; null `g2`/`g3` select the
 * default curve.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum PrsStatus prs_surface_new(const char *family,
                               uint32_t n,
                               const char *t0,
                               const char *g2,
                               const char *g3,
                               struct PrsSurface **out);

/**
 * # Safety
 * `s` must be null or come from [`prs_surface_new`].
 */
void prs_surface_free(struct PrsSurface *s);

/**
 * `h0` and `h1` of a sheaf on the surface.
 *
 * # Safety
 * `s` must be a live handle; `h0`, `h1` must be writable.
 */
enum PrsStatus prs_sheaf_dims(const struct PrsSurface *s,
                              enum PrsSheaf sheaf,
                              size_t *h0,
                              size_t *h1);

/**
 * Creates a Poisson structure from a coefficient list such as
 * `A=1,B=0,C=2/3`.
 *
 * # Safety
 * `s` must be a live handle, `coeffs` null or NUL-terminated, `out` writable.
 */
enum PrsStatus prs_poisson_new(const struct PrsSurface *s,
                               const char *coeffs,
                               struct PrsPoisson **out);

/**
 * # Safety
 * `p` must be null or come from [`prs_poisson_new`].
 */
void prs_poisson_free(struct PrsPoisson *p);

/**
 * Writes `(HP0, HP1, HP2)` into `hp[0..3]`.
 *
 * # Safety
 * `p` must be a live handle and `hp` point to three writable `size_t`.
 */
enum PrsStatus prs_poisson_cohomology(const struct PrsPoisson *p, size_t *hp);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum PrsStatus prs_poisson_verdict(const struct PrsPoisson *p, enum PrsVerdict *out);

/**
 * Bracket of two field expressions in chart 0 or 1; with `reduce` the
 * chart-1 class is appended.
 *
 * # Safety
 * `s` must be a live handle, strings NUL-terminated, `out` writable.
 */
enum PrsStatus prs_bracket(const struct PrsSurface *s,
                           const char *lhs,
                           const char *rhs,
                           uint8_t chart,
                           bool reduce,
                           char **out);

/**
 * Reproduces the classification table as JSON; `passed` reports whether
 * every row matched.
 *
 * # Safety
 * `out` and `passed` must be writable.
 */
enum PrsStatus prs_table_json(uint32_t n_max,
                              size_t samples,
                              uint64_t seed,
                              char **out,
                              bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRS_H */
