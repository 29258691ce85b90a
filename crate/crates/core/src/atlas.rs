//! The five ruled surfaces as two-chart gluings, and pushforward of fields
//! across the transition.
//!
//! Chart 0 has coordinates `(u, xi)` over a neighbourhood of the whole curve
//! minus `p`; chart 1 has `(u1, xi1)` over a disc around `p`, with `u = p + u1`.
//! On the overlap `xi = (alpha xi1 + beta) / (gamma xi1 + delta)`.

use std::fmt;

use num_traits::Zero;

use crate::elliptic::EllipticParams;
use crate::error::{Error, Result};
use crate::exactalg::{int, LaurentSeries, Rat, TwistedLaurent};
use crate::polyvector::{Bivector, ChartFunction, VectorField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Variant {
    S0,
    Twisted { t0: Rat },
    Sn { n: u32 },
    A0,
    Aminus1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceFamily {
    variant: Variant,
    elliptic: EllipticParams,
}

impl SurfaceFamily {
    pub fn new(variant: Variant, elliptic: EllipticParams) -> Result<Self> {
        match &variant {
            Variant::Twisted { t0 } if t0.is_zero() => {
                return Err(Error::InvalidParameters("twist t0 must be nonzero (t0 = 0 is S0)".into()))
            }
            Variant::Sn { n: 0 } => return Err(Error::InvalidParameters("S_n needs n >= 1 (n = 0 is S0)".into())),
            _ => {}
        }
        Ok(SurfaceFamily { variant, elliptic })
    }

    pub fn s0(e: EllipticParams) -> Self {
        SurfaceFamily { variant: Variant::S0, elliptic: e }
    }

    pub fn twisted(t0: Rat, e: EllipticParams) -> Result<Self> {
        Self::new(Variant::Twisted { t0 }, e)
    }

    pub fn sn(n: u32, e: EllipticParams) -> Result<Self> {
        Self::new(Variant::Sn { n }, e)
    }

    pub fn a0(e: EllipticParams) -> Self {
        SurfaceFamily { variant: Variant::A0, elliptic: e }
    }

    pub fn aminus1(e: EllipticParams) -> Self {
        SurfaceFamily { variant: Variant::Aminus1, elliptic: e }
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn elliptic(&self) -> &EllipticParams {
        &self.elliptic
    }

    /// Twist of the `E` generator (zero off the twisted family).
    pub fn t0(&self) -> Rat {
        match &self.variant {
            Variant::Twisted { t0 } => t0.clone(),
            _ => Rat::zero(),
        }
    }

    /// `n` for `S_n`, else 1 (used to size truncations).
    pub fn size_parameter(&self) -> u32 {
        match self.variant {
            Variant::Sn { n } => n,
            _ => 1,
        }
    }

    /// Short machine label: `s0`, `twisted`, `sn`, `a0`, `am1`.
    pub fn key(&self) -> &'static str {
        match self.variant {
            Variant::S0 => "s0",
            Variant::Twisted { .. } => "twisted",
            Variant::Sn { .. } => "sn",
            Variant::A0 => "a0",
            Variant::Aminus1 => "am1",
        }
    }
}

impl fmt::Display for SurfaceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.variant {
            Variant::S0 => write!(f, "S0"),
            Variant::Twisted { t0 } => write!(f, "S0-twisted(t0={})", t0),
            Variant::Sn { n } => write!(f, "S{}", n),
            Variant::A0 => write!(f, "A0"),
            Variant::Aminus1 => write!(f, "A-1"),
        }
    }
}

/// Precision used when the Moebius determinant is not a monomial.
pub const DEFAULT_INVERSE_ORDER: i64 = 32;

/// `xi = (alpha xi1 + beta) / (gamma xi1 + delta)` over the overlap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub alpha: TwistedLaurent,
    pub beta: TwistedLaurent,
    pub gamma: TwistedLaurent,
    pub delta: TwistedLaurent,
    /// Twist used to differentiate `E`.
    pub t0: Rat,
    /// Order through which a non-monomial determinant is inverted.
    pub inverse_order: i64,
}

fn u1(k: i64) -> TwistedLaurent {
    TwistedLaurent::monomial(int(1), k)
}

impl Transition {
    pub fn new(alpha: TwistedLaurent, beta: TwistedLaurent, gamma: TwistedLaurent, delta: TwistedLaurent, t0: Rat) -> Result<Self> {
        let tr = Transition { alpha, beta, gamma, delta, t0, inverse_order: DEFAULT_INVERSE_ORDER };
        if tr.det().is_zero() {
            return Err(Error::SingularTransition("alpha*delta - beta*gamma vanishes".into()));
        }
        Ok(tr)
    }

    pub fn with_inverse_order(mut self, order: i64) -> Self {
        self.inverse_order = order;
        self
    }

    pub fn det(&self) -> TwistedLaurent {
        self.alpha.mul(&self.delta).sub(&self.beta.mul(&self.gamma))
    }

    /// The Moebius map giving `xi1` in terms of `xi`.
    pub fn inverse(&self) -> Transition {
        Transition {
            alpha: self.delta.clone(),
            beta: self.beta.neg(),
            gamma: self.gamma.neg(),
            delta: self.alpha.clone(),
            t0: self.t0.clone(),
            inverse_order: self.inverse_order,
        }
    }

    /// Numerator `alpha xi1 + beta` as a polynomial in `xi1`.
    pub fn numerator(&self) -> ChartFunction {
        ChartFunction::new(vec![self.beta.clone(), self.alpha.clone()])
    }

    /// Denominator `gamma xi1 + delta`.
    pub fn denominator(&self) -> ChartFunction {
        ChartFunction::new(vec![self.delta.clone(), self.gamma.clone()])
    }

    fn det_inverse(&self) -> Result<TwistedLaurent> {
        self.det().inverse(self.inverse_order)
    }

    /// `sum_j h_j N^j D^(2-j)` for `deg h <= 2`: the substitution `xi = N/D`
    /// with the denominator cleared to degree 2.
    pub fn cleared_quadratic(&self, h: &ChartFunction) -> Result<ChartFunction> {
        if h.degree().is_some_and(|d| d > 2) {
            return Err(Error::IllFormedSection("substitution needs xi-degree at most 2".into()));
        }
        let (n, d) = (self.numerator(), self.denominator());
        let mut out = ChartFunction::zero();
        for j in 0..=2 {
            let c = h.coeff(j);
            if c.is_zero() {
                continue;
            }
            out = out.add(&n.pow(j).mul(&d.pow(2 - j)).mul_base(&c));
        }
        Ok(out)
    }

    /// `N_u D - N D_u`, the numerator of `d xi / d u1` at fixed `xi1`.
    pub fn u_wronskian(&self) -> ChartFunction {
        let (n, d) = (self.numerator(), self.denominator());
        n.d_u(&self.t0).mul(&d).sub(&n.mul(&d.d_u(&self.t0)))
    }
}

pub fn transition(family: &SurfaceFamily) -> Transition {
    let t0 = family.t0();
    let (one, zero) = (TwistedLaurent::one(), TwistedLaurent::zero());
    let (a, b, c, d) = match &family.variant {
        Variant::S0 => (one.clone(), zero.clone(), zero, one),
        Variant::Twisted { .. } => (TwistedLaurent::with_degree(1, LaurentSeries::one()), zero.clone(), zero, one),
        Variant::Sn { n } => (u1(*n as i64), zero.clone(), zero, one),
        Variant::A0 => (one.clone(), u1(-1), zero, one),
        Variant::Aminus1 => (u1(1), u1(-1), zero, one),
    };
    Transition::new(a, b, c, d, t0).expect("base transitions are invertible")
}

/// Writes a field given in the source chart of `tr` (coordinate `xi`,
/// with `xi = T(xi1)`) in the target chart's frame.
fn push_vector_along(tr: &Transition, v: &VectorField) -> Result<VectorField> {
    let inv = tr.det_inverse()?;
    let xi_part = tr.cleared_quadratic(v.xi_part())?.mul_base(&inv);
    let f = v.u_part().coeff(0);
    let correction = tr.u_wronskian().mul_base(&f.mul(&inv)).neg();
    VectorField::new(ChartFunction::constant(f), xi_part.add(&correction))
}

fn push_bivector_along(tr: &Transition, l: &Bivector) -> Result<Bivector> {
    let inv = tr.det_inverse()?;
    Bivector::new(tr.cleared_quadratic(l.h())?.mul_base(&inv))
}

/// Chart-1 field rewritten in chart-0 coordinates on the overlap.
pub fn push_vector(tr: &Transition, v_chart1: &VectorField) -> Result<VectorField> {
    push_vector_along(&tr.inverse(), v_chart1)
}

/// Chart-1 bivector rewritten in chart-0 coordinates on the overlap.
pub fn push_bivector(tr: &Transition, l_chart1: &Bivector) -> Result<Bivector> {
    push_bivector_along(&tr.inverse(), l_chart1)
}

/// Chart-0 field rewritten in chart-1 coordinates on the overlap.
pub fn push_vector_to_chart1(tr: &Transition, v_chart0: &VectorField) -> Result<VectorField> {
    push_vector_along(tr, v_chart0)
}

pub fn push_bivector_to_chart1(tr: &Transition, l_chart0: &Bivector) -> Result<Bivector> {
    push_bivector_along(tr, l_chart0)
}

/// Chart-0 function rewritten in chart-1 coordinates; defined when the
/// result stays polynomial in `xi1` (affine transitions or constants in `xi`).
pub fn push_function_to_chart1(tr: &Transition, f: &ChartFunction) -> Result<ChartFunction> {
    let deg = f.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(f.clone());
    }
    if !tr.gamma.is_zero() {
        return Err(Error::IllFormedSection("function of xi is not polynomial after a non-affine substitution".into()));
    }
    let dinv = tr.delta.inverse(tr.inverse_order)?;
    let affine = tr.numerator().mul_base(&dinv);
    let mut out = ChartFunction::zero();
    for j in 0..=deg {
        out = out.add(&affine.pow(j).mul_base(&f.coeff(j)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::polyvector::{lie_bracket, schouten_bv};

    fn e() -> EllipticParams {
        EllipticParams::default()
    }

    fn c(x: i64) -> LaurentSeries {
        LaurentSeries::constant(int(x))
    }

    fn z() -> LaurentSeries {
        LaurentSeries::zero()
    }

    fn all_families() -> Vec<SurfaceFamily> {
        vec![
            SurfaceFamily::s0(e()),
            SurfaceFamily::twisted(rat(3, 2), e()).unwrap(),
            SurfaceFamily::sn(1, e()).unwrap(),
            SurfaceFamily::sn(3, e()).unwrap(),
            SurfaceFamily::a0(e()),
            SurfaceFamily::aminus1(e()),
        ]
    }

    #[test]
    fn sn_fibre_frame() {
        let tr = transition(&SurfaceFamily::sn(2, e()).unwrap());
        let dxi1 = VectorField::from_series(z(), [c(1), z(), z()]);
        let pushed = push_vector(&tr, &dxi1).unwrap();
        assert_eq!(pushed, VectorField::from_series(z(), [LaurentSeries::monomial(int(1), 2), z(), z()]));
        let frame = Bivector::from_series([c(1), z(), z()]);
        assert_eq!(push_bivector(&tr, &frame).unwrap(), Bivector::from_series([LaurentSeries::monomial(int(1), 2), z(), z()]));
    }

    #[test]
    fn a0_base_frame() {
        let tr = transition(&SurfaceFamily::a0(e()));
        let du1 = VectorField::from_series(c(1), [z(), z(), z()]);
        let pushed = push_vector(&tr, &du1).unwrap();
        assert_eq!(pushed, VectorField::from_series(c(1), [LaurentSeries::monomial(int(-1), -2), z(), z()]));
        let frame = Bivector::from_series([c(1), z(), z()]);
        assert_eq!(push_bivector(&tr, &frame).unwrap(), frame);
    }

    #[test]
    fn s0_is_identity() {
        let tr = transition(&SurfaceFamily::s0(e()));
        let v = VectorField::from_series(c(3), [c(1), LaurentSeries::monomial(int(2), -1), c(5)]);
        assert_eq!(push_vector(&tr, &v).unwrap(), v);
    }

    #[test]
    fn twisted_e_factors_cancel() {
        let tr = transition(&SurfaceFamily::twisted(rat(3, 2), e()).unwrap());
        let l = Bivector::from_series([z(), c(1), z()]);
        assert_eq!(push_bivector(&tr, &l).unwrap(), l);
        let dxi1 = VectorField::from_series(z(), [c(1), z(), z()]);
        let pushed = push_vector(&tr, &dxi1).unwrap();
        assert_eq!(pushed.xi_part().coeff(0), TwistedLaurent::with_degree(1, LaurentSeries::one()));
        // d/du1 = -(t0/u1^2) E xi1 d/dxi + d/du, and E xi1 = xi
        let du1 = VectorField::from_series(c(1), [z(), z(), z()]);
        let pushed = push_vector(&tr, &du1).unwrap();
        let want = VectorField::from_series(c(1), [z(), LaurentSeries::monomial(rat(-3, 2), -2), z()]);
        assert_eq!(pushed, want);
    }

    #[test]
    fn round_trips() {
        let v = VectorField::from_series(
            LaurentSeries::from_terms([(-1, int(2)), (1, int(1))]),
            [c(1), LaurentSeries::monomial(rat(1, 3), -2), c(-4)],
        );
        let l = Bivector::from_series([c(2), LaurentSeries::monomial(int(1), -1), c(1)]);
        for fam in all_families() {
            let tr = transition(&fam);
            let there = push_vector(&tr, &v).unwrap();
            assert_eq!(push_vector_to_chart1(&tr, &there).unwrap(), v, "{}", fam);
            let lb = push_bivector(&tr, &l).unwrap();
            assert_eq!(push_bivector_to_chart1(&tr, &lb).unwrap(), l, "{}", fam);
        }
    }

    #[test]
    fn functoriality() {
        let v = VectorField::from_series(c(1), [LaurentSeries::monomial(int(1), -1), c(2), z()]);
        let w = VectorField::from_series(LaurentSeries::monomial(int(3), 1), [z(), z(), c(1)]);
        let l = Bivector::from_series([c(1), c(-2), LaurentSeries::monomial(int(1), 2)]);
        for fam in all_families() {
            let tr = transition(&fam);
            let t0 = fam.t0();
            let lhs = push_vector_to_chart1(&tr, &lie_bracket(&v, &w, &int(0)).unwrap()).unwrap();
            let (pv, pw) = (push_vector_to_chart1(&tr, &v).unwrap(), push_vector_to_chart1(&tr, &w).unwrap());
            assert_eq!(lhs, lie_bracket(&pv, &pw, &t0).unwrap(), "{}", fam);
            let lhs = push_bivector_to_chart1(&tr, &schouten_bv(&l, &v, &int(0)).unwrap()).unwrap();
            let pl = push_bivector_to_chart1(&tr, &l).unwrap();
            assert_eq!(lhs, schouten_bv(&pl, &pv, &t0).unwrap(), "{}", fam);
        }
    }

    #[test]
    fn rejects_degenerate_variants() {
        assert!(SurfaceFamily::twisted(int(0), e()).is_err());
        assert!(SurfaceFamily::sn(0, e()).is_err());
    }

    #[test]
    fn functions_under_affine_maps() {
        let tr = transition(&SurfaceFamily::a0(e()));
        let xi = ChartFunction::monomial(TwistedLaurent::one(), 1);
        let pushed = push_function_to_chart1(&tr, &xi).unwrap();
        assert_eq!(pushed, ChartFunction::new(vec![u1(-1), TwistedLaurent::one()]));
    }
}
