//! Poisson cohomology of `(S, Lambda0)` from the sheaf cohomology:
//!
//! ```text
//! HH^0 = ker(H^0(Theta) -> H^0(wedge^2 Theta))
//! HH^1 = coker(H^0(Theta) -> H^0(wedge^2 Theta)) + ker(H^1(Theta) -> H^1(wedge^2 Theta))
//! HH^2 = coker(H^1(Theta) -> H^1(wedge^2 Theta))
//! ```
//!
//! with both maps induced by `[Lambda0, -]`.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::atlas::{SurfaceFamily, Variant};
use crate::cech::{presentation, standard_h0_basis, GlobalSection, Section, Sheaf, Truncation};
use crate::error::{Error, Result};
use crate::exactalg::{Rat, RatMatrix};
use crate::families;
use crate::polyvector::schouten_bv;

/// A holomorphic Poisson structure, by its coordinates in the displayed
/// basis of `H^0(wedge^2 Theta)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    family: SurfaceFamily,
    coeffs: Vec<Rat>,
}

/// Coefficient names per family: `(A, B, C)`, `(A)`, `(a0, c0, ..., c_{n-1})`,
/// `(a0)`, `()`.
pub fn param_names(family: &SurfaceFamily) -> Vec<String> {
    match family.variant() {
        Variant::S0 => vec!["A".into(), "B".into(), "C".into()],
        Variant::Twisted { .. } => vec!["A".into()],
        Variant::Sn { n } => {
            let mut v = vec!["a0".to_string()];
            v.extend((0..*n).map(|i| format!("c{}", i)));
            v
        }
        Variant::A0 => vec!["a0".into()],
        Variant::Aminus1 => Vec::new(),
    }
}

impl PoissonStructure {
    pub fn new(family: SurfaceFamily, coeffs: Vec<Rat>) -> Result<Self> {
        let names = param_names(&family);
        if coeffs.len() != names.len() {
            return Err(Error::Arity(format!(
                "{} takes {} coefficient(s) ({}), got {}",
                family,
                names.len(),
                names.join(", "),
                coeffs.len()
            )));
        }
        Ok(PoissonStructure { family, coeffs })
    }

    pub fn zero(family: SurfaceFamily) -> Self {
        let n = param_names(&family).len();
        PoissonStructure { family, coeffs: vec![Rat::zero(); n] }
    }

    pub fn family(&self) -> &SurfaceFamily {
        &self.family
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn scale(&self, c: &Rat) -> Self {
        PoissonStructure { family: self.family.clone(), coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `Lambda0` as a chart-0 global bivector.
    pub fn bivector(&self) -> GlobalSection {
        let basis = standard_h0_basis(&self.family, Sheaf::Wedge2Theta);
        let mut out = GlobalSection::zero(Sheaf::Wedge2Theta);
        for (c, b) in self.coeffs.iter().zip(&basis) {
            out = out.add(&b.scale(c));
        }
        out
    }

    pub fn class(&self) -> CoefficientClass {
        match self.family.variant() {
            Variant::S0 if self.is_zero() => CoefficientClass::S0Zero,
            Variant::S0 => CoefficientClass::S0Nonzero,
            Variant::Twisted { .. } => CoefficientClass::TwistedAny,
            Variant::Sn { n } => {
                if self.is_zero() {
                    CoefficientClass::SnZero
                } else if !self.coeffs[0].is_zero() {
                    CoefficientClass::SnA0Nonzero
                } else if *n == 1 {
                    CoefficientClass::S1A0ZeroC0Nonzero
                } else {
                    CoefficientClass::SnA0ZeroANonzero
                }
            }
            Variant::A0 => CoefficientClass::A0Any,
            Variant::Aminus1 => CoefficientClass::Aminus1Zero,
        }
    }
}

impl fmt::Display for PoissonStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = param_names(&self.family);
        let parts: Vec<String> = names.iter().zip(&self.coeffs).map(|(n, c)| format!("{}={}", n, c)).collect();
        write!(f, "{} [{}]", self.family, parts.join(","))
    }
}

/// The rows of the classification: each Poisson structure falls in one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CoefficientClass {
    S0Zero,
    S0Nonzero,
    TwistedAny,
    SnZero,
    S1A0ZeroC0Nonzero,
    SnA0ZeroANonzero,
    SnA0Nonzero,
    A0Any,
    Aminus1Zero,
}

impl CoefficientClass {
    pub fn label(self) -> &'static str {
        match self {
            CoefficientClass::S0Zero => "0",
            CoefficientClass::S0Nonzero => "(A,B,C)!=0",
            CoefficientClass::TwistedAny => "any",
            CoefficientClass::SnZero => "0",
            CoefficientClass::S1A0ZeroC0Nonzero => "a0=0,c0!=0",
            CoefficientClass::SnA0ZeroANonzero => "a0=0,A!=0",
            CoefficientClass::SnA0Nonzero => "a0!=0",
            CoefficientClass::A0Any => "any",
            CoefficientClass::Aminus1Zero => "0",
        }
    }

    /// Published dimensions and verdict for this row at fibre degree `n`.
    pub fn expected(self, n: u32) -> ([usize; 3], Verdict) {
        let n = n as usize;
        use Verdict::*;
        match self {
            CoefficientClass::S0Zero => ([4, 7, 3], Obstructed),
            CoefficientClass::S0Nonzero => ([2, 3, 1], Unobstructed),
            CoefficientClass::TwistedAny => ([2, 3, 1], Unobstructed),
            CoefficientClass::SnZero => ([n + 1, 2 * n + 2, n + 1], Obstructed),
            CoefficientClass::S1A0ZeroC0Nonzero => ([1, 2, 1], Unobstructed),
            CoefficientClass::SnA0ZeroANonzero => ([n, 2 * n, n], Obstructed),
            CoefficientClass::SnA0Nonzero => ([1, 2, 1], Unobstructed),
            CoefficientClass::A0Any => ([2, 3, 1], Unobstructed),
            CoefficientClass::Aminus1Zero => ([1, 1, 0], Unobstructed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Obstructed,
    Unobstructed,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Obstructed => write!(f, "obstructed"),
            Verdict::Unobstructed => write!(f, "unobstructed"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

fn bivector_section(s: Section) -> Result<crate::polyvector::Bivector> {
    match s {
        Section::Bivector(b) => Ok(b),
        Section::Vector(_) => Err(Error::IllFormedSection("expected a bivector".into())),
    }
}

fn vector_section(s: &Section) -> Result<&crate::polyvector::VectorField> {
    match s {
        Section::Vector(v) => Ok(v),
        Section::Bivector(_) => Err(Error::IllFormedSection("expected a vector field".into())),
    }
}

/// `[Lambda0, -]: H^0(Theta) -> H^0(wedge^2 Theta)` in the `h0_basis` bases.
pub fn induced_map_h0(p: &PoissonStructure, tr: &Truncation) -> Result<RatMatrix> {
    let fam = &p.family;
    let theta = presentation(fam, Sheaf::Theta, tr)?;
    let wedge = presentation(fam, Sheaf::Wedge2Theta, tr)?;
    let order = tr.n;
    let lambda = bivector_section(p.bivector().chart0(fam.elliptic(), order)?)?;
    let zero = Rat::zero();
    let mut columns = Vec::new();
    for x in theta.h0_basis() {
        let xv = x.chart0(fam.elliptic(), order)?;
        let br = schouten_bv(&lambda, vector_section(&xv)?, &zero)?;
        columns.push(wedge.h0_coordinates(&Section::Bivector(br))?);
    }
    Ok(RatMatrix::from_columns(wedge.h0_dim(), &columns))
}

/// `Lambda0` written in the chart-1 frame.
pub fn lambda_chart1(p: &PoissonStructure, tr: &Truncation) -> Result<crate::polyvector::Bivector> {
    bivector_section(p.bivector().chart1(&p.family, tr.n)?)
}

/// `[Lambda0, -]: H^1(Theta) -> H^1(wedge^2 Theta)` in the `h1_reps` bases.
pub fn induced_map_h1(p: &PoissonStructure, tr: &Truncation) -> Result<RatMatrix> {
    let fam = &p.family;
    let theta = presentation(fam, Sheaf::Theta, tr)?;
    let wedge = presentation(fam, Sheaf::Wedge2Theta, tr)?;
    let lambda = lambda_chart1(p, tr)?;
    let t0 = fam.t0();
    let mut columns = Vec::new();
    for r in theta.h1_reps() {
        let br = schouten_bv(&lambda, vector_section(r)?, &t0)?;
        columns.push(wedge.reduce_class(&Section::Bivector(br))?);
    }
    Ok(RatMatrix::from_columns(wedge.h1_dim(), &columns))
}

#[derive(Clone, Debug)]
pub struct PoissonCohomology {
    pub hp: [usize; 3],
    /// `h0(Theta), h1(Theta), h0(wedge^2), h1(wedge^2)`.
    pub sheaf_dims: [usize; 4],
    pub h0_map: RatMatrix,
    pub h1_map: RatMatrix,
    /// Indices into the `H^0(wedge^2 Theta)` basis spanning the cokernel.
    pub coker_indices: Vec<usize>,
    /// The cokernel part of `HH^1`, as global bivectors.
    pub coker_part: Vec<GlobalSection>,
    /// Kernel basis of the `H^1` map, in `H^1(Theta)` coordinates.
    pub ker_part: Vec<Vec<Rat>>,
    /// The same kernel basis as overlap cocycles.
    pub ker_sections: Vec<Section>,
}

impl PoissonCohomology {
    /// Coordinates in `coker_part` of an element of `H^0(wedge^2 Theta)`
    /// modulo the image of `H^0(Theta)`.
    pub fn coker_coordinates(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        let rows = self.h0_map.rows();
        let mut cols: Vec<Vec<Rat>> = (0..self.h0_map.cols()).map(|j| self.h0_map.column(j)).collect();
        for &i in &self.coker_indices {
            let mut e = vec![Rat::zero(); rows];
            e[i] = Rat::from_integer(1.into());
            cols.push(e);
        }
        let m = RatMatrix::from_columns(rows, &cols);
        let sol = m.solve(x).ok_or_else(|| Error::InvalidStructure("cokernel coordinates".into()))?;
        Ok(sol[self.h0_map.cols()..].to_vec())
    }

    /// Coordinates in `ker_part` of an `H^1(Theta)` class; fails when the
    /// class is not in the kernel.
    pub fn ker_coordinates(&self, c: &[Rat]) -> Result<Vec<Rat>> {
        if !self.h1_map.mul_vec(c).iter().all(Zero::is_zero) {
            return Err(Error::InconsistentFamily("class is not in the kernel of [Lambda0, -] on H^1".into()));
        }
        if self.ker_part.is_empty() {
            return Ok(Vec::new());
        }
        let m = RatMatrix::from_columns(c.len(), &self.ker_part);
        m.solve(c).ok_or_else(|| Error::InvalidStructure("kernel coordinates".into()))
    }
}

pub fn poisson_cohomology(p: &PoissonStructure, tr: &Truncation) -> Result<PoissonCohomology> {
    let fam = &p.family;
    let theta = presentation(fam, Sheaf::Theta, tr)?;
    let wedge = presentation(fam, Sheaf::Wedge2Theta, tr)?;
    let h0_map = induced_map_h0(p, tr)?;
    let h1_map = induced_map_h1(p, tr)?;
    let (r0, coker_indices) = h0_map.cokernel_complement();
    let r1 = h1_map.rank();
    let ker_part = h1_map.kernel_basis();
    let ker_sections = ker_part.iter().map(|c| theta.class_section(c)).collect::<Result<Vec<_>>>()?;
    let coker_part = coker_indices.iter().map(|&i| wedge.h0_basis()[i].clone()).collect();
    let hp = [
        theta.h0_dim() - r0,
        (wedge.h0_dim() - r0) + (theta.h1_dim() - r1),
        wedge.h1_dim() - r1,
    ];
    Ok(PoissonCohomology {
        hp,
        sheaf_dims: [theta.h0_dim(), theta.h1_dim(), wedge.h0_dim(), wedge.h1_dim()],
        h0_map,
        h1_map,
        coker_indices,
        coker_part,
        ker_part,
        ker_sections,
    })
}

/// A pair `(a, b)` whose bracket class escapes the image of the `H^1` map.
#[derive(Clone, Debug)]
pub struct Witness {
    pub a_index: usize,
    pub a: GlobalSection,
    pub b_index: usize,
    pub b: Section,
    pub bracket: Section,
    pub bracket_class: Vec<Rat>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a = {} ; b = {} ; [a,b] = {}", self.a, self.b, self.bracket)
    }
}

/// Searches `a` over the `H^0(wedge^2 Theta)` basis and `b` over the kernel
/// basis of the `H^1` map, in lexicographic order.
pub fn obstruction_witness(p: &PoissonStructure, tr: &Truncation) -> Result<Option<Witness>> {
    let fam = &p.family;
    let wedge = presentation(fam, Sheaf::Wedge2Theta, tr)?;
    let pc = poisson_cohomology(p, tr)?;
    let t0 = fam.t0();
    for (i, a) in wedge.h0_basis().iter().enumerate() {
        let a1 = bivector_section(a.chart1(fam, tr.n)?)?;
        for (j, b) in pc.ker_sections.iter().enumerate() {
            let br = schouten_bv(&a1, vector_section(b)?, &t0)?;
            let bracket = Section::Bivector(br);
            let class = wedge.reduce_class(&bracket)?;
            let in_image = class.iter().all(Zero::is_zero) || pc.h1_map.solve(&class).is_some();
            if !in_image {
                return Ok(Some(Witness {
                    a_index: i,
                    a: a.clone(),
                    b_index: j,
                    b: b.clone(),
                    bracket,
                    bracket_class: class,
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// `Some(ok)` when a registered family exists: well-defined and
    /// Kodaira-Spencer isomorphism.
    pub family_verified: Option<bool>,
}

pub fn verdict_report(p: &PoissonStructure, tr: &Truncation) -> Result<VerdictReport> {
    if let Some(w) = obstruction_witness(p, tr)? {
        return Ok(VerdictReport { verdict: Verdict::Obstructed, witness: Some(w), family_verified: None });
    }
    let family_verified = match families::registered_family(p) {
        Some(f) => Some(families::verify_lambda_welldefined(&f, f.required_samples())? && families::ks_is_isomorphism(&f, tr)?),
        None => None,
    };
    let verdict = if family_verified == Some(true) { Verdict::Unobstructed } else { Verdict::Inconclusive };
    Ok(VerdictReport { verdict, witness: None, family_verified })
}

pub fn verdict(p: &PoissonStructure, tr: &Truncation) -> Result<Verdict> {
    Ok(verdict_report(p, tr)?.verdict)
}
