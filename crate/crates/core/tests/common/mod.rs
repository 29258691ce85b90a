//! Generators and checks shared by the property suites and the acceptance run.
#![allow(dead_code)]

use num_traits::Zero;
use proptest::prelude::*;

use prs_core::atlas::{push_bivector, push_bivector_to_chart1, push_vector, push_vector_to_chart1, transition, SurfaceFamily};
use prs_core::elliptic::{realize_principal_part, residue, wp_expansion, EllipticFunction, EllipticParams};
use prs_core::exactalg::{int, rat, LaurentSeries, Rat};
use prs_core::polyvector::{lie_bracket, schouten_bv, Bivector, ChartFunction, VectorField};

pub fn small_rat() -> impl Strategy<Value = Rat> {
    (-12i64..=12, 1i64..=7).prop_map(|(n, d)| rat(n, d))
}

pub fn nonzero_rat() -> impl Strategy<Value = Rat> {
    (1i64..=97, 1i64..=97, any::<bool>()).prop_map(|(n, d, s)| rat(if s { n } else { -n }, d))
}

/// Exact Laurent polynomial with exponents in `[-3, 3]`.
pub fn laurent() -> impl Strategy<Value = LaurentSeries> {
    proptest::collection::vec(small_rat(), 7).prop_map(|c| LaurentSeries::from_terms((-3i64..=3).zip(c)))
}

pub fn vector_field() -> impl Strategy<Value = VectorField> {
    (laurent(), laurent(), laurent(), laurent()).prop_map(|(b, a0, a1, a2)| VectorField::from_series(b, [a0, a1, a2]))
}

pub fn bivector() -> impl Strategy<Value = Bivector> {
    (laurent(), laurent(), laurent()).prop_map(|(h0, h1, h2)| Bivector::from_series([h0, h1, h2]))
}

pub fn curve() -> impl Strategy<Value = EllipticParams> {
    (nonzero_rat(), nonzero_rat()).prop_filter_map("singular curve", |(g2, g3)| EllipticParams::new(g2, g3).ok())
}

pub fn all_families(e: &EllipticParams) -> Vec<SurfaceFamily> {
    vec![
        SurfaceFamily::s0(e.clone()),
        SurfaceFamily::twisted(rat(2, 5), e.clone()).unwrap(),
        SurfaceFamily::sn(2, e.clone()).unwrap(),
        SurfaceFamily::a0(e.clone()),
        SurfaceFamily::aminus1(e.clone()),
    ]
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// `(wp')^2 - 4 wp^3 + g2 wp + g3` vanishes through the trusted order.
pub fn check_ode(p: &EllipticParams, order: i64) -> Result<(), String> {
    let wp = wp_expansion(p, order).map_err(|e| e.to_string())?;
    let d = wp.derivative();
    let lhs = &d * &d;
    let cube = &(&wp * &wp) * &wp;
    let rhs = &(&cube.scale(&int(4)) - &wp.scale(p.g2())) - &LaurentSeries::constant(p.g3().clone());
    let r = &lhs - &rhs;
    check(r.is_zero() && r.precision().is_some_and(|h| h >= order - 6), || format!("ODE residual {}", r))
}

pub fn check_residue_free(p: &EllipticParams, f: &EllipticFunction) -> Result<(), String> {
    let s = f.to_series(p, 6).map_err(|e| e.to_string())?;
    let r = residue(&s).map_err(|e| e.to_string())?;
    check(r.is_zero(), || format!("residue {} of {}", r, f))
}

/// A principal part with nonzero residue must be rejected; with the residue
/// removed it must be realized exactly.
pub fn check_principal_part(p: &EllipticParams, pp: &LaurentSeries, res: &Rat) -> Result<(), String> {
    let with_res = pp + &LaurentSeries::monomial(res.clone(), -1);
    if !res.is_zero() {
        check(
            matches!(realize_principal_part(&with_res, p), Err(prs_core::Error::OrderOnePole { .. })),
            || "nonzero residue accepted".into(),
        )?;
    }
    let f = realize_principal_part(pp, p).map_err(|e| e.to_string())?;
    let back = f.to_series(p, 2).map_err(|e| e.to_string())?.principal_part().map_err(|e| e.to_string())?;
    check(&back == pp, || format!("realized {} has principal part {}", f, back))
}

pub fn check_lie_axioms(u: &VectorField, v: &VectorField, w: &VectorField) -> Result<(), String> {
    let z = Rat::zero();
    let br = |a: &VectorField, b: &VectorField| lie_bracket(a, b, &z).unwrap();
    check(br(u, v).add(&br(v, u)).is_zero(), || "Lie bracket not antisymmetric".into())?;
    let jac = br(u, &br(v, w)).add(&br(v, &br(w, u))).add(&br(w, &br(u, v)));
    check(jac.is_zero(), || "Jacobi identity fails".into())?;
    // Leibniz in a base function: [u, f v] = u(f) v + f [u, v]
    let f = ChartFunction::constant(prs_core::exactalg::TwistedLaurent::plain(LaurentSeries::monomial(int(3), 2)));
    let fv = VectorField::new(v.u_part().mul(&f), v.xi_part().mul(&f)).unwrap();
    let uf = u.apply(&f, &z);
    let rhs = VectorField::new(v.u_part().mul(&uf), v.xi_part().mul(&uf)).unwrap();
    let uv = br(u, v);
    let rhs = rhs.add(&VectorField::new(uv.u_part().mul(&f), uv.xi_part().mul(&f)).unwrap());
    check(br(u, &fv).sub(&rhs).is_zero(), || "Leibniz rule fails".into())
}

/// `[L, v]` against `-L_v P` computed index by index, and the mixed
/// Jacobi identity `[L,[v,w]] = [[L,v],w] - [[L,w],v]`.
pub fn check_schouten(l: &Bivector, v: &VectorField, w: &VectorField) -> Result<(), String> {
    let z = Rat::zero();
    let got = schouten_bv(l, v, &z).unwrap();
    check(got.h() == &lie_derivative_oracle(l, v).neg(), || "Schouten bracket disagrees with -L_v P".into())?;
    let lhs = schouten_bv(l, &lie_bracket(v, w, &z).unwrap(), &z).unwrap();
    let a = schouten_bv(&schouten_bv(l, v, &z).unwrap(), w, &z).unwrap();
    let b = schouten_bv(&schouten_bv(l, w, &z).unwrap(), v, &z).unwrap();
    check(lhs.sub(&a.sub(&b)).is_zero(), || "mixed Jacobi identity fails".into())
}

/// `(L_v P)^{12}` with coordinates `x1 = xi`, `x2 = u`, `P^{12} = h`.
fn lie_derivative_oracle(l: &Bivector, v: &VectorField) -> ChartFunction {
    let z = Rat::zero();
    let h = l.h().clone();
    let p = |i: usize, j: usize| match (i, j) {
        (0, 1) => h.clone(),
        (1, 0) => h.neg(),
        _ => ChartFunction::zero(),
    };
    let comp = |i: usize| if i == 0 { v.xi_part().clone() } else { v.u_part().clone() };
    let d = |f: &ChartFunction, k: usize| if k == 0 { f.d_xi() } else { f.d_u(&z) };
    let mut out = ChartFunction::zero();
    for k in 0..2 {
        out = out.add(&comp(k).mul(&d(&p(0, 1), k)));
        out = out.sub(&p(k, 1).mul(&d(&comp(0), k)));
        out = out.sub(&p(0, k).mul(&d(&comp(1), k)));
    }
    out
}

pub fn check_pushforward(e: &EllipticParams, v: &VectorField, w: &VectorField, l: &Bivector) -> Result<(), String> {
    let z = Rat::zero();
    for fam in all_families(e) {
        let tr = transition(&fam);
        let t0 = fam.t0();
        let pv = push_vector_to_chart1(&tr, v).map_err(|e| e.to_string())?;
        let pw = push_vector_to_chart1(&tr, w).map_err(|e| e.to_string())?;
        let pl = push_bivector_to_chart1(&tr, l).map_err(|e| e.to_string())?;
        check(&push_vector(&tr, &pv).unwrap() == v, || format!("vector round trip fails on {}", fam))?;
        check(&push_bivector(&tr, &pl).unwrap() == l, || format!("bivector round trip fails on {}", fam))?;
        let lhs = push_vector_to_chart1(&tr, &lie_bracket(v, w, &z).unwrap()).unwrap();
        check(lhs == lie_bracket(&pv, &pw, &t0).unwrap(), || format!("Lie functoriality fails on {}", fam))?;
        let lhs = push_bivector_to_chart1(&tr, &schouten_bv(l, v, &z).unwrap()).unwrap();
        check(lhs == schouten_bv(&pl, &pv, &t0).unwrap(), || format!("Schouten functoriality fails on {}", fam))?;
    }
    Ok(())
}
