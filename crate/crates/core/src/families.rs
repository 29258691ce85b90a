//! Explicit Poisson analytic families and their Kodaira-Spencer maps.
//!
//! Identities in the deformation parameters are checked on a tensor grid
//! with one more point per parameter than the degree bound, which proves
//! them as polynomial identities.

use std::fmt;

use num_traits::{One, Zero};

use crate::atlas::{transition, SurfaceFamily, Transition, Variant};
use crate::cech::{presentation, GlobalSection, Section, Sheaf, Truncation};
use crate::elliptic::EllipticFunction;
use crate::error::{Error, Result};
use crate::exactalg::{int, LaurentSeries, Rat, RatMatrix, TwistedLaurent};
use crate::poissonco::{poisson_cohomology, PoissonStructure};
use crate::polyvector::{ChartFunction, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeformParam {
    Tau,
    T,
    T1,
}

impl fmt::Display for DeformParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeformParam::Tau => write!(f, "tau"),
            DeformParam::T => write!(f, "t"),
            DeformParam::T1 => write!(f, "t1"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// `xi = ((u1+B't)xi1 + A't)/(-C't xi1 + u1)`, `Lambda = A'+B'xi+C'xi^2`.
    S0Mobius,
    /// `xi = e^((t0+t)/u1) xi1`, `Lambda = (A+t1) xi`.
    TwistedExp,
    /// `xi = u1^n xi1`, `Lambda = (a0+t) xi + A(u) xi^2`.
    SnLinear,
    /// `xi = (u1 xi1 + 1)/(t xi1 + u1)`, `Lambda = (a0+t1)(1 - t xi^2)`.
    A0Mobius,
    /// The base elliptic family only.
    TauOnly,
}

#[derive(Clone, Debug)]
pub struct FamilyDefinition {
    pub base: PoissonStructure,
    pub kind: FamilyKind,
    pub deformation_params: Vec<DeformParam>,
    /// Complement direction `(F1, F2, F3)` for the `S0` family.
    pub complement: Vec<Rat>,
}

fn u1(c: Rat, k: i64) -> TwistedLaurent {
    TwistedLaurent::monomial(c, k)
}

fn konst(c: Rat) -> TwistedLaurent {
    TwistedLaurent::constant(c)
}

/// `[A+B xi+C xi^2, X]` on the `S0` basis `d_u, d_xi, xi d_xi, xi^2 d_xi`,
/// in the basis `1, xi, xi^2`.
fn s0_h0_map(a: &Rat, b: &Rat, c: &Rat) -> RatMatrix {
    let z = Rat::zero();
    let two = int(2);
    RatMatrix::from_columns(
        3,
        &[
            vec![z.clone(), z.clone(), z.clone()],
            vec![-b.clone(), -(&two * c), z.clone()],
            vec![a.clone(), z.clone(), -c.clone()],
            vec![z.clone(), &two * a, b.clone()],
        ],
    )
}

/// The paper's family for the coefficient class of `p`, if there is one.
pub fn registered_family(p: &PoissonStructure) -> Option<FamilyDefinition> {
    use DeformParam::*;
    let cs = p.coeffs();
    let (kind, params, complement) = match p.family().variant() {
        Variant::S0 if !p.is_zero() => {
            let (_, idx) = s0_h0_map(&cs[0], &cs[1], &cs[2]).cokernel_complement();
            let mut f = vec![Rat::zero(); 3];
            f[idx[0]] = Rat::one();
            (FamilyKind::S0Mobius, vec![Tau, T, T1], f)
        }
        Variant::Twisted { .. } => (FamilyKind::TwistedExp, vec![Tau, T, T1], Vec::new()),
        Variant::Sn { .. } if !cs[0].is_zero() => (FamilyKind::SnLinear, vec![Tau, T], Vec::new()),
        Variant::Sn { n: 1 } if !cs[1].is_zero() => (FamilyKind::SnLinear, vec![Tau, T], Vec::new()),
        Variant::A0 => (FamilyKind::A0Mobius, vec![Tau, T, T1], Vec::new()),
        Variant::Aminus1 => (FamilyKind::TauOnly, vec![Tau], Vec::new()),
        _ => return None,
    };
    Some(FamilyDefinition { base: p.clone(), kind, deformation_params: params, complement })
}

impl FamilyDefinition {
    fn family(&self) -> &SurfaceFamily {
        self.base.family()
    }

    fn has(&self, p: DeformParam) -> bool {
        self.deformation_params.contains(&p)
    }

    /// Degree bounds in `(t, t1)` of the cleared identity
    /// `sum_j h0_j N^j D^(2-j) = h1 det`.
    pub fn degree_bounds(&self) -> (usize, usize) {
        match self.kind {
            FamilyKind::S0Mobius => (2, 3),
            FamilyKind::TwistedExp => (0, 1),
            FamilyKind::SnLinear => (1, 0),
            FamilyKind::A0Mobius => (2, 1),
            FamilyKind::TauOnly => (0, 0),
        }
    }

    /// Samples per parameter needed for a complete identity test.
    pub fn required_samples(&self) -> usize {
        let (a, b) = self.degree_bounds();
        a.max(b) + 1
    }

    fn primed(&self, t1: &Rat) -> (Rat, Rat, Rat) {
        let c = self.base.coeffs();
        let f = &self.complement;
        (&c[0] + t1 * &f[0], &c[1] + t1 * &f[1], &c[2] + t1 * &f[2])
    }

    /// The transition with parameters fixed to rationals.
    pub fn full_transition(&self, t: &Rat, t1: &Rat) -> Result<Transition> {
        let fam = self.family();
        match self.kind {
            FamilyKind::S0Mobius => {
                let (a, b, c) = self.primed(t1);
                Transition::new(
                    u1(int(1), 1).add(&konst(b * t)),
                    konst(a * t),
                    konst(-(c * t)),
                    u1(int(1), 1),
                    Rat::zero(),
                )
            }
            FamilyKind::TwistedExp => Transition::new(
                TwistedLaurent::with_degree(1, LaurentSeries::one()),
                TwistedLaurent::zero(),
                TwistedLaurent::zero(),
                TwistedLaurent::one(),
                fam.t0() + t,
            ),
            FamilyKind::A0Mobius => Transition::new(
                u1(int(1), 1),
                TwistedLaurent::one(),
                konst(t.clone()),
                u1(int(1), 1),
                Rat::zero(),
            ),
            FamilyKind::SnLinear | FamilyKind::TauOnly => Ok(transition(fam)),
        }
    }

    /// `d/dt (alpha, beta, gamma, delta)` at the origin.
    pub fn transition_jet(&self) -> [TwistedLaurent; 4] {
        let z = TwistedLaurent::zero();
        let c = self.base.coeffs();
        match self.kind {
            FamilyKind::S0Mobius => [konst(c[1].clone()), konst(c[0].clone()), konst(-c[2].clone()), z],
            FamilyKind::TwistedExp => {
                [TwistedLaurent::with_degree(1, LaurentSeries::monomial(Rat::one(), -1)), z.clone(), z.clone(), z]
            }
            FamilyKind::A0Mobius => [z.clone(), z.clone(), TwistedLaurent::one(), z],
            FamilyKind::SnLinear | FamilyKind::TauOnly => [z.clone(), z.clone(), z.clone(), z],
        }
    }

    fn sn_coefficient(&self) -> EllipticFunction {
        let c = self.base.coeffs();
        let mut a = EllipticFunction::constant(c[1].clone());
        for (k, ck) in c[2..].iter().enumerate() {
            a = a.add(&EllipticFunction::wp(k, ck.clone()));
        }
        a
    }

    /// `Lambda` at fixed parameters: chart-0 and chart-1 coefficients of
    /// `d_xi ^ d_u` and `d_xi1 ^ d_u1`.
    pub fn lambda_at(&self, t: &Rat, t1: &Rat, order: i64) -> Result<(ChartFunction, ChartFunction)> {
        let c = self.base.coeffs();
        let k = |x: Rat| konst(x);
        match self.kind {
            FamilyKind::S0Mobius => {
                let (a, b, cc) = self.primed(t1);
                let h = ChartFunction::new(vec![k(a), k(b), k(cc)]);
                Ok((h.clone(), h))
            }
            FamilyKind::TwistedExp => {
                let h = ChartFunction::new(vec![TwistedLaurent::zero(), k(&c[0] + t1)]);
                Ok((h.clone(), h))
            }
            FamilyKind::SnLinear => {
                let n = self.family().size_parameter() as i64;
                let a = TwistedLaurent::plain(self.sn_coefficient().to_series(self.family().elliptic(), order)?);
                let lin = k(&c[0] + t);
                let h0 = ChartFunction::new(vec![TwistedLaurent::zero(), lin.clone(), a.clone()]);
                let h1 = ChartFunction::new(vec![TwistedLaurent::zero(), lin, a.shift(n).truncate(order)]);
                Ok((h0.truncate(order), h1))
            }
            FamilyKind::A0Mobius => {
                let s = &c[0] + t1;
                let h = ChartFunction::new(vec![k(s.clone()), TwistedLaurent::zero(), k(-(s * t))]);
                Ok((h.clone(), h))
            }
            FamilyKind::TauOnly => Ok((ChartFunction::zero(), ChartFunction::zero())),
        }
    }

    /// `d Lambda / d param` at the origin as a chart-0 global section, for
    /// the directions that keep the transition fixed.
    pub fn lambda_jet(&self, param: DeformParam) -> Option<GlobalSection> {
        let w = Sheaf::Wedge2Theta;
        let one = || EllipticFunction::constant(Rat::one());
        match (self.kind, param) {
            (FamilyKind::S0Mobius, DeformParam::T1) => {
                let coeffs = self.complement.iter().map(|f| EllipticFunction::constant(f.clone())).collect();
                GlobalSection::new(w, coeffs).ok()
            }
            (FamilyKind::TwistedExp, DeformParam::T1) => Some(GlobalSection::single(w, 1, one())),
            (FamilyKind::SnLinear, DeformParam::T) => Some(GlobalSection::single(w, 1, one())),
            (FamilyKind::A0Mobius, DeformParam::T1) => Some(GlobalSection::single(w, 0, one())),
            _ => None,
        }
    }

    /// `dT/dt` at the origin in the chart-1 frame: the overlap vector field
    /// `(N' D - N D') / det * d_xi1`.
    pub fn theta_dot(&self) -> Result<VectorField> {
        let tr = self.full_transition(&Rat::zero(), &Rat::zero())?;
        let [da, db, dc, dd] = self.transition_jet();
        let ndot = ChartFunction::new(vec![db, da]);
        let ddot = ChartFunction::new(vec![dd, dc]);
        let num = ndot.mul(&tr.denominator()).sub(&tr.numerator().mul(&ddot));
        let inv = tr.det().inverse(tr.inverse_order)?;
        VectorField::new(ChartFunction::zero(), num.mul_base(&inv))
    }

    fn grid(&self, samples: usize) -> Vec<(Rat, Rat)> {
        let ts: Vec<Rat> = if self.has(DeformParam::T) { (0..samples as i64).map(int).collect() } else { vec![Rat::zero()] };
        let t1s: Vec<Rat> = if self.has(DeformParam::T1) { (0..samples as i64).map(int).collect() } else { vec![Rat::zero()] };
        ts.iter().flat_map(|t| t1s.iter().map(move |t1| (t.clone(), t1.clone()))).collect()
    }
}

/// Checks `sum_j h0_j N^j D^(2-j) = h1 * det` at every grid point.
pub fn verify_lambda_welldefined(f: &FamilyDefinition, samples: usize) -> Result<bool> {
    if samples < f.required_samples() {
        return Err(Error::InvalidParameters(format!(
            "{} samples per parameter needed, got {}",
            f.required_samples(),
            samples
        )));
    }
    let order = 2 * f.family().size_parameter() as i64 + 6;
    for (t, t1) in f.grid(samples) {
        let tr = match f.full_transition(&t, &t1) {
            Ok(tr) => tr,
            Err(Error::SingularTransition(_)) => continue,
            Err(e) => return Err(e),
        };
        let (h0, h1) = f.lambda_at(&t, &t1, order)?;
        let lhs = tr.cleared_quadratic(&h0)?;
        let rhs = h1.mul_base(&tr.det());
        if !lhs.sub(&rhs).truncate(order).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The displayed frame identities: for the `S0` family
/// `N_xi1 D - N D_xi1 = det = u1^2 + B't u1 + A'C't^2`; for the `A0` family
/// `D^2 - t N^2 = (1 - t xi1^2)(u1^2 - t)`.
pub fn frame_identity_holds(f: &FamilyDefinition, samples: usize) -> Result<bool> {
    for (t, t1) in f.grid(samples) {
        let tr = f.full_transition(&t, &t1)?;
        let (n, d) = (tr.numerator(), tr.denominator());
        let ok = match f.kind {
            FamilyKind::S0Mobius => {
                let (a, b, c) = f.primed(&t1);
                let det = u1(int(1), 2).add(&u1(b * &t, 1)).add(&konst(a * c * &t * &t));
                let wr = n.d_xi().mul(&d).sub(&n.mul(&d.d_xi()));
                tr.det() == det && wr.sub(&ChartFunction::constant(det)).is_zero()
            }
            FamilyKind::A0Mobius => {
                let lhs = d.pow(2).sub(&n.pow(2).scale(&t));
                let rhs = ChartFunction::new(vec![konst(Rat::one()), TwistedLaurent::zero(), konst(-t.clone())])
                    .mul_base(&u1(int(1), 2).sub(&konst(t.clone())));
                lhs.sub(&rhs).is_zero() && tr.det() == u1(int(1), 2).sub(&konst(t.clone()))
            }
            _ => true,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rows follow `coker_part` then `ker_part` of `HH^1`; columns follow
/// `deformation_params`.
#[derive(Clone, Debug)]
pub struct KSMatrix {
    pub params: Vec<DeformParam>,
    pub matrix: RatMatrix,
    pub coker_rows: usize,
}

impl KSMatrix {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

/// Columns with a moving transition get their `ker_part` coordinates and
/// zero `coker_part` entries; this lower-triangular truncation can only
/// lower the rank, so full rank of the result proves full rank.
pub fn ks_matrix(f: &FamilyDefinition, tr: &Truncation) -> Result<KSMatrix> {
    let fam = f.family();
    let pc = poisson_cohomology(&f.base, tr)?;
    let theta = presentation(fam, Sheaf::Theta, tr)?;
    let wedge = presentation(fam, Sheaf::Wedge2Theta, tr)?;
    let nc = pc.coker_part.len();
    let nk = pc.ker_part.len();
    let mut cols = Vec::new();
    for &p in &f.deformation_params {
        let mut col = vec![Rat::zero(); nc + nk];
        let class = match p {
            DeformParam::Tau => Some(Section::monomial(Sheaf::Theta, 0, Rat::one(), -1)),
            // t1 enters the transition only through t*t1
            DeformParam::T1 => None,
            DeformParam::T => {
                let td = f.theta_dot()?;
                (!td.is_zero()).then_some(Section::Vector(td))
            }
        };
        if let Some(s) = class {
            let c = theta.reduce_class(&s)?;
            let k = pc.ker_coordinates(&c)?;
            col[nc..].clone_from_slice(&k);
        } else if let Some(g) = f.lambda_jet(p) {
            let x = wedge.h0_coordinates(&g.chart0(fam.elliptic(), tr.n)?)?;
            let k = pc.coker_coordinates(&x)?;
            col[..nc].clone_from_slice(&k);
        }
        cols.push(col);
    }
    Ok(KSMatrix { params: f.deformation_params.clone(), matrix: RatMatrix::from_columns(nc + nk, &cols), coker_rows: nc })
}

pub fn ks_is_isomorphism(f: &FamilyDefinition, tr: &Truncation) -> Result<bool> {
    let hp1 = poisson_cohomology(&f.base, tr)?.hp[1];
    Ok(ks_matrix(f, tr)?.rank() == hp1 && f.deformation_params.len() == hp1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::SurfaceFamily;
    use crate::elliptic::EllipticParams;
    use crate::exactalg::rat;
    use crate::poissonco::induced_map_h0;

    fn e() -> EllipticParams {
        EllipticParams::default()
    }

    fn all_registered() -> Vec<FamilyDefinition> {
        let ps = vec![
            PoissonStructure::new(SurfaceFamily::s0(e()), vec![int(1), int(2), int(3)]).unwrap(),
            PoissonStructure::new(SurfaceFamily::s0(e()), vec![int(1), int(0), int(0)]).unwrap(),
            PoissonStructure::new(SurfaceFamily::twisted(rat(1, 3), e()).unwrap(), vec![int(7)]).unwrap(),
            PoissonStructure::new(SurfaceFamily::sn(2, e()).unwrap(), vec![int(2), int(1), rat(1, 2)]).unwrap(),
            PoissonStructure::new(SurfaceFamily::sn(1, e()).unwrap(), vec![int(0), int(1)]).unwrap(),
            PoissonStructure::new(SurfaceFamily::a0(e()), vec![rat(5, 2)]).unwrap(),
            PoissonStructure::new(SurfaceFamily::a0(e()), vec![int(0)]).unwrap(),
            PoissonStructure::zero(SurfaceFamily::aminus1(e())),
        ];
        ps.iter().map(|p| registered_family(p).expect("registered")).collect()
    }

    #[test]
    fn registered_families_verify() {
        for f in all_registered() {
            let tr = Truncation::default_for(f.family());
            assert!(verify_lambda_welldefined(&f, f.required_samples()).unwrap(), "{:?}", f.kind);
            assert!(frame_identity_holds(&f, f.required_samples()).unwrap(), "{:?}", f.kind);
            assert!(ks_is_isomorphism(&f, &tr).unwrap(), "{:?} {}", f.kind, f.base);
        }
    }

    #[test]
    fn unregistered_rows() {
        assert!(registered_family(&PoissonStructure::zero(SurfaceFamily::s0(e()))).is_none());
        assert!(registered_family(&PoissonStructure::zero(SurfaceFamily::sn(2, e()).unwrap())).is_none());
        let s2 = SurfaceFamily::sn(2, e()).unwrap();
        assert!(registered_family(&PoissonStructure::new(s2, vec![int(0), int(1), int(0)]).unwrap()).is_none());
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let f = registered_family(&PoissonStructure::new(SurfaceFamily::s0(e()), vec![int(1), int(2), int(3)]).unwrap()).unwrap();
        assert!(verify_lambda_welldefined(&f, 2).is_err());
    }

    #[test]
    fn origin_reproduces_base() {
        for f in all_registered() {
            let fam = f.family();
            let tr0 = f.full_transition(&Rat::zero(), &Rat::zero()).unwrap();
            let base = transition(fam);
            let cross = tr0.numerator().mul(&base.denominator()).sub(&base.numerator().mul(&tr0.denominator()));
            assert!(cross.is_zero(), "{:?}", f.kind);
            let order = 2 * fam.size_parameter() as i64 + 6;
            let (h0, _) = f.lambda_at(&Rat::zero(), &Rat::zero(), order).unwrap();
            let want = f.base.bivector().chart0(fam.elliptic(), order).unwrap();
            let got = Section::Bivector(crate::polyvector::Bivector::new(h0).unwrap());
            assert!(got.add(&want.scale(&int(-1))).unwrap().truncate(order).is_zero(), "{:?}", f.kind);
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        for f in all_registered() {
            if !matches!(f.kind, FamilyKind::S0Mobius | FamilyKind::A0Mobius) {
                continue;
            }
            let h = rat(1, 7);
            let p = f.full_transition(&h, &Rat::zero()).unwrap();
            let m = f.full_transition(&-h.clone(), &Rat::zero()).unwrap();
            let s = Rat::one() / (int(2) * &h);
            let fd = [
                p.alpha.sub(&m.alpha).scale(&s),
                p.beta.sub(&m.beta).scale(&s),
                p.gamma.sub(&m.gamma).scale(&s),
                p.delta.sub(&m.delta).scale(&s),
            ];
            assert_eq!(fd, f.transition_jet(), "{:?}", f.kind);
        }
    }

    #[test]
    fn theta_dot_displays() {
        let p = PoissonStructure::new(SurfaceFamily::s0(e()), vec![int(1), int(2), int(3)]).unwrap();
        let td = registered_family(&p).unwrap().theta_dot().unwrap();
        let want = ChartFunction::new(vec![u1(int(1), -1), u1(int(2), -1), u1(int(3), -1)]);
        assert!(td.xi_part().sub(&want).is_zero());
        let p = PoissonStructure::new(SurfaceFamily::twisted(rat(1, 3), e()).unwrap(), vec![int(7)]).unwrap();
        let td = registered_family(&p).unwrap().theta_dot().unwrap();
        assert!(td.xi_part().sub(&ChartFunction::monomial(u1(int(1), -1), 1)).is_zero());
        let p = PoissonStructure::new(SurfaceFamily::a0(e()), vec![int(1)]).unwrap();
        let td = registered_family(&p).unwrap().theta_dot().unwrap();
        let want = ChartFunction::new(vec![TwistedLaurent::zero(), u1(int(-1), -2), u1(int(-1), -1)]);
        assert!(td.xi_part().sub(&want).is_zero());
    }

    #[test]
    fn s0_complement_matches_computed_map() {
        let p = PoissonStructure::new(SurfaceFamily::s0(e()), vec![int(1), int(2), int(3)]).unwrap();
        let m = induced_map_h0(&p, &Truncation::default_for(p.family())).unwrap();
        assert_eq!(m, s0_h0_map(&int(1), &int(2), &int(3)));
    }
}
