mod common;

use common::*;
use proptest::prelude::*;

use prs_core::atlas::SurfaceFamily;
use prs_core::cech::{presentation, Sheaf, Truncation};
use prs_core::elliptic::{EllipticFunction, EllipticParams};
use prs_core::exactalg::{LaurentSeries, Rat};
use prs_core::poissonco::{induced_map_h0, induced_map_h1, poisson_cohomology, verdict, PoissonStructure};

fn principal_part() -> impl Strategy<Value = LaurentSeries> {
    proptest::collection::vec(small_rat(), 5).prop_map(|c| LaurentSeries::from_terms((-6i64..=-2).zip(c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wp_satisfies_its_ode(p in curve()) {
        prop_assert_eq!(check_ode(&p, 14), Ok(()));
    }

    #[test]
    fn elliptic_expansions_have_no_residue(p in curve(), c in proptest::collection::vec(small_rat(), 1..5), k in small_rat()) {
        let f = EllipticFunction { constant: k, wp_coeffs: c };
        prop_assert_eq!(check_residue_free(&p, &f), Ok(()));
    }

    #[test]
    fn principal_parts(pp in principal_part(), res in small_rat()) {
        prop_assert_eq!(check_principal_part(&EllipticParams::default(), &pp, &res), Ok(()));
    }

    #[test]
    fn lie_bracket_axioms(u in vector_field(), v in vector_field(), w in vector_field()) {
        prop_assert_eq!(check_lie_axioms(&u, &v, &w), Ok(()));
    }

    #[test]
    fn schouten_matches_oracle(l in bivector(), v in vector_field(), w in vector_field()) {
        prop_assert_eq!(check_schouten(&l, &v, &w), Ok(()));
    }

    #[test]
    fn pushforward_round_trip_and_functoriality(v in vector_field(), w in vector_field(), l in bivector()) {
        prop_assert_eq!(check_pushforward(&EllipticParams::default(), &v, &w, &l), Ok(()));
    }
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<Rat>> {
    proptest::collection::vec(nonzero_rat(), n)
}

fn surfaces() -> Vec<SurfaceFamily> {
    let e = EllipticParams::default();
    vec![
        SurfaceFamily::s0(e.clone()),
        SurfaceFamily::twisted(Rat::new(3.into(), 7.into()), e.clone()).unwrap(),
        SurfaceFamily::sn(1, e.clone()).unwrap(),
        SurfaceFamily::sn(3, e.clone()).unwrap(),
        SurfaceFamily::a0(e.clone()),
        SurfaceFamily::aminus1(e),
    ]
}

fn structure(fam: &SurfaceFamily, c: &[Rat], zero_mask: u8) -> PoissonStructure {
    let n = prs_core::poissonco::param_names(fam).len();
    let c = (0..n).map(|i| if zero_mask >> i & 1 == 1 { Rat::from_integer(0.into()) } else { c[i].clone() }).collect();
    PoissonStructure::new(fam.clone(), c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn induced_maps_are_linear(which in 0usize..6, a in coeffs(4), b in coeffs(4), s in nonzero_rat()) {
        let fam = &surfaces()[which];
        let tr = Truncation::default_for(fam);
        let (pa, pb) = (structure(fam, &a, 0), structure(fam, &b, 0));
        let sum: Vec<Rat> = pa.coeffs().iter().zip(pb.coeffs()).map(|(x, y)| x + y).collect();
        let ps = PoissonStructure::new(fam.clone(), sum).unwrap();
        for f in [induced_map_h0, induced_map_h1] {
            prop_assert_eq!(f(&ps, &tr).unwrap(), f(&pa, &tr).unwrap().add(&f(&pb, &tr).unwrap()));
            prop_assert_eq!(f(&pa.scale(&s), &tr).unwrap(), f(&pa, &tr).unwrap().scale(&s));
        }
    }

    #[test]
    fn verdicts_and_euler_characteristic(which in 0usize..6, a in coeffs(4), mask in 0u8..16, s in nonzero_rat()) {
        let fam = &surfaces()[which];
        let tr = Truncation::default_for(fam);
        let p = structure(fam, &a, mask);
        let hp = poisson_cohomology(&p, &tr).unwrap().hp;
        let t = presentation(fam, Sheaf::Theta, &tr).unwrap();
        let w = presentation(fam, Sheaf::Wedge2Theta, &tr).unwrap();
        let chi = (t.h0_dim() as i64 - t.h1_dim() as i64) - (w.h0_dim() as i64 - w.h1_dim() as i64);
        prop_assert_eq!(hp[0] as i64 - hp[1] as i64 + hp[2] as i64, chi);
        let scaled = p.scale(&s);
        prop_assert_eq!(poisson_cohomology(&scaled, &tr).unwrap().hp, hp);
        prop_assert_eq!(verdict(&scaled, &tr).unwrap(), verdict(&p, &tr).unwrap());
        let (want_hp, want_v) = p.class().expected(fam.size_parameter());
        prop_assert_eq!(hp, want_hp);
        prop_assert_eq!(verdict(&p, &tr).unwrap(), want_v);
    }
}
