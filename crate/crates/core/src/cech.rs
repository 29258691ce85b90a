//! Čech cohomology of `Theta` and `wedge^2 Theta` on the two-chart cover.
//!
//! Chart-0 sections have coefficients in `1, wp, ..., wp^(K)`; chart-1
//! sections are power series in `u1`. Overlap cochains are written in the
//! chart-1 frame. Every chart-0 basis section is pushed to chart 1 and its
//! Laurent coefficients become a column; the nonnegative, untwisted rows are
//! absorbed by chart-1 sections and dropped.
//!
//! Rows split into the window `W` (untwisted, exponents `-M..=-1`, on the
//! components a chart-0 section can reach untwisted) and the deep rows
//! (everything else that must vanish). Then `H^0` is the kernel of the column
//! matrix and `H^1 = W / (image ∩ W)`, with
//! `dim H^1 = |W| - rank(D) + rank(D_deep)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::atlas::{push_bivector_to_chart1, push_vector_to_chart1, transition, SurfaceFamily, Transition, Variant};
use crate::elliptic::{wp_derivative_tower, wp_label, EllipticFunction, EllipticParams};
use crate::error::{Error, Result};
use crate::exactalg::{fmt_rat_term, int, EchelonBasis, LaurentSeries, Rat, RatMatrix, SparseVec, TwistedLaurent};
use crate::polyvector::{Bivector, ChartFunction, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sheaf {
    Theta,
    Wedge2Theta,
}

impl Sheaf {
    pub fn components(self) -> usize {
        match self {
            Sheaf::Theta => 4,
            Sheaf::Wedge2Theta => 3,
        }
    }

    /// Frame monomial of component `i`: `d_u, d_xi, xi*d_xi, xi^2*d_xi` or
    /// `d_xi^d_u, xi*d_xi^d_u, xi^2*d_xi^d_u`.
    pub fn component_label(self, i: usize) -> &'static str {
        match (self, i) {
            (Sheaf::Theta, 0) => "d_u",
            (Sheaf::Theta, 1) => "d_xi",
            (Sheaf::Theta, 2) => "xi*d_xi",
            (Sheaf::Theta, 3) => "xi^2*d_xi",
            (Sheaf::Wedge2Theta, 0) => "d_xi^d_u",
            (Sheaf::Wedge2Theta, 1) => "xi*d_xi^d_u",
            (Sheaf::Wedge2Theta, 2) => "xi^2*d_xi^d_u",
            _ => panic!("component {} out of range", i),
        }
    }
}

impl fmt::Display for Sheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sheaf::Theta => write!(f, "Theta"),
            Sheaf::Wedge2Theta => write!(f, "Wedge2Theta"),
        }
    }
}

/// A vector field or bivector on one chart (or on the overlap).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Section {
    Vector(VectorField),
    Bivector(Bivector),
}

impl Section {
    pub fn sheaf(&self) -> Sheaf {
        match self {
            Section::Vector(_) => Sheaf::Theta,
            Section::Bivector(_) => Sheaf::Wedge2Theta,
        }
    }

    /// Coefficients in the order of [`Sheaf::component_label`].
    pub fn components(&self) -> Vec<TwistedLaurent> {
        match self {
            Section::Vector(v) => {
                vec![v.u_part().coeff(0), v.xi_part().coeff(0), v.xi_part().coeff(1), v.xi_part().coeff(2)]
            }
            Section::Bivector(l) => (0..3).map(|j| l.h().coeff(j)).collect(),
        }
    }

    pub fn from_components(sheaf: Sheaf, comps: Vec<TwistedLaurent>) -> Section {
        assert_eq!(comps.len(), sheaf.components());
        match sheaf {
            Sheaf::Theta => {
                let mut it = comps.into_iter();
                let b = it.next().unwrap();
                let v = VectorField::new(ChartFunction::constant(b), ChartFunction::new(it.collect()))
                    .expect("components respect the caps");
                Section::Vector(v)
            }
            Sheaf::Wedge2Theta => Section::Bivector(Bivector::new(ChartFunction::new(comps)).expect("degree <= 2")),
        }
    }

    /// `c * u1^e` in component `comp`.
    pub fn monomial(sheaf: Sheaf, comp: usize, c: Rat, e: i64) -> Section {
        let mut comps = vec![TwistedLaurent::zero(); sheaf.components()];
        comps[comp] = TwistedLaurent::monomial(c, e);
        Section::from_components(sheaf, comps)
    }

    pub fn zero(sheaf: Sheaf) -> Section {
        Section::from_components(sheaf, vec![TwistedLaurent::zero(); sheaf.components()])
    }

    pub fn add(&self, other: &Section) -> Result<Section> {
        match (self, other) {
            (Section::Vector(a), Section::Vector(b)) => Ok(Section::Vector(a.add(b))),
            (Section::Bivector(a), Section::Bivector(b)) => Ok(Section::Bivector(a.add(b))),
            _ => Err(Error::IllFormedSection("cannot add a vector field and a bivector".into())),
        }
    }

    pub fn scale(&self, c: &Rat) -> Section {
        match self {
            Section::Vector(v) => Section::Vector(v.scale(c)),
            Section::Bivector(l) => Section::Bivector(l.scale(c)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Section::Vector(v) => v.is_zero(),
            Section::Bivector(l) => l.is_zero(),
        }
    }

    pub fn precision(&self) -> Option<i64> {
        match self {
            Section::Vector(v) => v.precision(),
            Section::Bivector(l) => l.precision(),
        }
    }

    pub fn truncate(&self, hi: i64) -> Section {
        match self {
            Section::Vector(v) => Section::Vector(v.truncate(hi)),
            Section::Bivector(l) => Section::Bivector(l.truncate(hi)),
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Section::Vector(v) => v.fmt(f),
            Section::Bivector(l) => l.fmt(f),
        }
    }
}

pub fn push_section_to_chart1(tr: &Transition, s: &Section) -> Result<Section> {
    match s {
        Section::Vector(v) => push_vector_to_chart1(tr, v).map(Section::Vector),
        Section::Bivector(l) => push_bivector_to_chart1(tr, l).map(Section::Bivector),
    }
}

/// A global section given by its chart-0 form with elliptic coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalSection {
    sheaf: Sheaf,
    coeffs: Vec<EllipticFunction>,
}

impl GlobalSection {
    pub fn new(sheaf: Sheaf, coeffs: Vec<EllipticFunction>) -> Result<Self> {
        if coeffs.len() != sheaf.components() {
            return Err(Error::Arity(format!("{} needs {} components, got {}", sheaf, sheaf.components(), coeffs.len())));
        }
        Ok(GlobalSection { sheaf, coeffs })
    }

    pub fn zero(sheaf: Sheaf) -> Self {
        GlobalSection { sheaf, coeffs: vec![EllipticFunction::zero(); sheaf.components()] }
    }

    /// `f` times the frame monomial of component `comp`.
    pub fn single(sheaf: Sheaf, comp: usize, f: EllipticFunction) -> Self {
        let mut g = Self::zero(sheaf);
        g.coeffs[comp] = f;
        g
    }

    pub fn sheaf(&self) -> Sheaf {
        self.sheaf
    }

    pub fn coeffs(&self) -> &[EllipticFunction] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        GlobalSection { sheaf: self.sheaf, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        GlobalSection { sheaf: self.sheaf, coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(EllipticFunction::is_zero)
    }

    /// Chart-0 form with coefficients expanded at `p` through `order`.
    pub fn chart0(&self, params: &EllipticParams, order: i64) -> Result<Section> {
        let comps = self
            .coeffs
            .iter()
            .map(|f| f.to_series(params, order).map(TwistedLaurent::plain))
            .collect::<Result<Vec<_>>>()?;
        Ok(Section::from_components(self.sheaf, comps))
    }

    /// Chart-1 form, trusted through `order`.
    pub fn chart1(&self, family: &SurfaceFamily, order: i64) -> Result<Section> {
        let margin = family.size_parameter() as i64 + 3;
        let s = self.chart0(family.elliptic(), order + margin)?;
        Ok(push_section_to_chart1(&transition(family), &s)?.truncate(order))
    }
}

impl fmt::Display for GlobalSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, g) in self.coeffs.iter().enumerate() {
            let label = self.sheaf.component_label(i);
            if !g.constant.is_zero() {
                fmt_rat_term(f, first, &g.constant, label)?;
                first = false;
            }
            for (k, c) in g.wp_coeffs.iter().enumerate() {
                if !c.is_zero() {
                    fmt_rat_term(f, first, c, &format!("{}*{}", wp_label(k), label))?;
                    first = false;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Pole depth `m` of overlap cochains, holomorphic order `n` on chart 1,
/// and the elliptic derivative cap `k` on chart 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Truncation {
    pub m: i64,
    pub n: i64,
    pub k: usize,
}

impl Truncation {
    /// `M = N = 2n+6`, `K = M+n+2` (with `n = 1` off the `S_n` family).
    ///
    /// The window rows of depth `M` in the `xi^2` component of `S_n` are
    /// reached only by `wp^(M+n-2)`, so `K` must grow with `M`.
    pub fn default_for(family: &SurfaceFamily) -> Self {
        let n = family.size_parameter() as i64;
        let m = 2 * n + 6;
        Truncation { m, n: m, k: (m + n + 2) as usize }
    }

    pub fn doubled(&self) -> Self {
        Truncation { m: 2 * self.m, n: 2 * self.n, k: 2 * self.k }
    }

    pub fn validate(&self, family: &SurfaceFamily) -> Result<()> {
        let n = family.size_parameter() as i64;
        if self.m < n + 3 || self.n < self.m || (self.k as i64) < n {
            return Err(Error::InvalidParameters(format!(
                "truncation M={}, N={}, K={} below the minimum M>={}, N>=M, K>={}",
                self.m,
                self.n,
                self.k,
                n + 3,
                n
            )));
        }
        Ok(())
    }

    fn margin(family: &SurfaceFamily) -> i64 {
        family.size_parameter() as i64 + 3
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M={} N={} K={}", self.m, self.n, self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct RowKey {
    comp: usize,
    e_degree: i32,
    exponent: i64,
}

/// Chart-0 basis functions per component: the constant, then `wp^(k)`.
fn basis_function(kidx: usize) -> EllipticFunction {
    if kidx == 0 {
        EllipticFunction::constant(Rat::one())
    } else {
        EllipticFunction::wp(kidx - 1, Rat::one())
    }
}

/// Chart-1 coefficients of every chart-0 basis section, read through `hi`.
fn chart0_columns(
    family: &SurfaceFamily,
    sheaf: Sheaf,
    tr: &Truncation,
    hi: i64,
) -> Result<Vec<BTreeMap<RowKey, Rat>>> {
    let order = hi + Truncation::margin(family);
    let tower = wp_derivative_tower(family.elliptic(), tr.k, order)?;
    let mut funcs = vec![LaurentSeries::one()];
    funcs.extend(tower);
    let gl = transition(family);
    let mut cols = Vec::with_capacity(sheaf.components() * funcs.len());
    for comp in 0..sheaf.components() {
        for s in &funcs {
            let mut comps = vec![TwistedLaurent::zero(); sheaf.components()];
            comps[comp] = TwistedLaurent::plain(s.clone());
            let pushed = push_section_to_chart1(&gl, &Section::from_components(sheaf, comps))?;
            let mut col = BTreeMap::new();
            for (c, x) in pushed.components().iter().enumerate() {
                for (m, part) in x.parts() {
                    if let Some(p) = part.precision() {
                        if p < hi {
                            return Err(Error::UntrustedWindow { exponent: hi, trusted: p.to_string() });
                        }
                    }
                    for (e, v) in part.terms() {
                        if e <= hi {
                            col.insert(RowKey { comp: c, e_degree: m, exponent: e }, v.clone());
                        }
                    }
                }
            }
            cols.push(col);
        }
    }
    Ok(cols)
}

/// Matrix of the Čech differential `C^0 -> C^1` in the ansatz bases.
///
/// Columns are the chart-0 basis sections (`component x {1, wp, ..., wp^(K)}`)
/// followed by the chart-1 sections (`component x u1^m`, `0 <= m <= N`);
/// rows are overlap monomials `(component, E-degree, exponent <= N)` in the
/// chart-1 frame. Entries are `theta0|overlap - theta1|overlap`.
pub fn coboundary_matrix(family: &SurfaceFamily, sheaf: Sheaf, tr: &Truncation) -> Result<RatMatrix> {
    tr.validate(family)?;
    let cols0 = chart0_columns(family, sheaf, tr, tr.n)?;
    let mut keys: BTreeSet<RowKey> = cols0.iter().flat_map(|c| c.keys().copied()).collect();
    for comp in 0..sheaf.components() {
        for e in 0..=tr.n {
            keys.insert(RowKey { comp, e_degree: 0, exponent: e });
        }
    }
    let index: HashMap<RowKey, usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let ncols1 = sheaf.components() * (tr.n as usize + 1);
    let mut m = RatMatrix::zeros(keys.len(), cols0.len() + ncols1);
    for (j, col) in cols0.iter().enumerate() {
        for (k, v) in col {
            m.set(index[k], j, v.clone());
        }
    }
    let mut j = cols0.len();
    for comp in 0..sheaf.components() {
        for e in 0..=tr.n {
            m.set(index[&RowKey { comp, e_degree: 0, exponent: e }], j, int(-1));
            j += 1;
        }
    }
    Ok(m)
}

/// Computed bases of `H^0` and `H^1` of one sheaf on one surface.
#[derive(Clone, Debug)]
pub struct CohomologyPresentation {
    family: SurfaceFamily,
    sheaf: Sheaf,
    truncation: Truncation,
    cocycle_components: Vec<usize>,
    /// Kernel of the column matrix, decoded.
    h0_kernel: Vec<GlobalSection>,
    /// Displayed basis of `H^0` when it verifies, else the kernel.
    h0_basis: Vec<GlobalSection>,
    h0_standard: bool,
    /// Displayed representatives of `H^1` when they verify, else the
    /// computed complement.
    h1_reps: Vec<Section>,
    h1_standard: bool,
    complement: Vec<RowKey>,
    window_index: HashMap<RowKey, usize>,
    basis: EchelonBasis,
    /// Normal forms of `h1_reps` on the complement, as columns.
    rep_matrix: RatMatrix,
}

impl CohomologyPresentation {
    pub fn build(family: &SurfaceFamily, sheaf: Sheaf, tr: &Truncation) -> Result<Self> {
        tr.validate(family)?;
        let cols = chart0_columns(family, sheaf, tr, tr.n)?;
        let ncomp = sheaf.components();
        let per_comp = tr.k + 2;

        let cocycle_components: Vec<usize> =
            (0..ncomp).filter(|c| cols.iter().any(|col| col.keys().any(|k| k.comp == *c && k.e_degree == 0))).collect();
        let in_window =
            |k: &RowKey| k.e_degree == 0 && cocycle_components.contains(&k.comp) && (-tr.m..=-1).contains(&k.exponent);
        let ignored = |k: &RowKey| k.e_degree == 0 && k.exponent >= 0;

        // deep rows first, deepest exponent first, then the window
        let mut deep: BTreeSet<(i64, i32, usize)> = BTreeSet::new();
        for col in &cols {
            for k in col.keys() {
                if !ignored(k) && !in_window(k) {
                    deep.insert((k.exponent, k.e_degree, k.comp));
                }
            }
        }
        let mut order: Vec<RowKey> =
            deep.iter().map(|&(exponent, e_degree, comp)| RowKey { comp, e_degree, exponent }).collect();
        let n_deep = order.len();
        for e in -tr.m..=-1 {
            for &comp in &cocycle_components {
                order.push(RowKey { comp, e_degree: 0, exponent: e });
            }
        }
        let index: HashMap<RowKey, usize> = order.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let window_index: HashMap<RowKey, usize> =
            order[n_deep..].iter().enumerate().map(|(i, k)| (*k, i + n_deep)).collect();

        let sparse: Vec<SparseVec> = cols
            .iter()
            .map(|col| col.iter().filter(|(k, _)| !ignored(k)).map(|(k, v)| (index[k], v.clone())).collect())
            .collect();
        let mut basis = EchelonBasis::new();
        let mut deep_basis = EchelonBasis::new();
        for v in &sparse {
            basis.insert(v.clone());
            deep_basis.insert(v.iter().filter(|(i, _)| **i < n_deep).map(|(i, x)| (*i, x.clone())).collect());
        }
        let window_pivots = basis.pivots().filter(|p| *p >= n_deep).count();
        debug_assert_eq!(window_pivots, basis.rank() - deep_basis.rank());
        let complement: Vec<RowKey> = order[n_deep..].iter().filter(|k| !basis.pivots().any(|p| p == index[k])).copied().collect();

        let decode = |v: &SparseVec| {
            let mut coeffs = vec![EllipticFunction::zero(); ncomp];
            for (j, x) in v {
                let (comp, kidx) = (j / per_comp, j % per_comp);
                coeffs[comp] = coeffs[comp].add(&basis_function(kidx).scale(x));
            }
            GlobalSection { sheaf, coeffs }
        };
        let h0_kernel: Vec<GlobalSection> = basis.kernel().iter().map(decode).collect();

        let mut pres = CohomologyPresentation {
            family: family.clone(),
            sheaf,
            truncation: *tr,
            cocycle_components,
            h0_basis: h0_kernel.clone(),
            h0_kernel,
            h0_standard: false,
            h1_reps: Vec::new(),
            h1_standard: false,
            complement,
            window_index,
            basis,
            rep_matrix: RatMatrix::zeros(0, 0),
        };

        let standard = standard_h0_basis(family, sheaf);
        if pres.verify_h0_candidates(&standard, &sparse)? {
            pres.h0_basis = standard;
            pres.h0_standard = true;
        }

        let computed: Vec<Section> =
            pres.complement.iter().map(|k| Section::monomial(sheaf, k.comp, Rat::one(), k.exponent)).collect();
        let dim = pres.complement.len();
        let mut used = computed;
        let mut rep_matrix = RatMatrix::identity(dim);
        let standard = standard_h1_reps(family, sheaf);
        if standard.len() == dim {
            let columns = standard.iter().map(|r| pres.complement_coordinates(r)).collect::<Result<Vec<_>>>();
            if let Ok(columns) = columns {
                let m = RatMatrix::from_columns(dim, &columns);
                if m.rank() == dim {
                    used = standard;
                    rep_matrix = m;
                    pres.h1_standard = true;
                }
            }
        }
        pres.h1_reps = used;
        pres.rep_matrix = rep_matrix;
        Ok(pres)
    }

    /// Candidates must lie in the kernel and be a basis of it.
    fn verify_h0_candidates(&self, cands: &[GlobalSection], cols: &[SparseVec]) -> Result<bool> {
        if cands.len() != self.h0_kernel.len() {
            return Ok(false);
        }
        let per_comp = self.truncation.k + 2;
        let mut span = EchelonBasis::new();
        for g in cands {
            let mut coords = SparseVec::new();
            let mut image = SparseVec::new();
            for (comp, f) in g.coeffs.iter().enumerate() {
                if f.wp_coeffs.len() > self.truncation.k + 1 {
                    return Ok(false);
                }
                let entries =
                    std::iter::once(&f.constant).chain(f.wp_coeffs.iter()).enumerate().filter(|(_, x)| !x.is_zero());
                for (kidx, x) in entries {
                    let j = comp * per_comp + kidx;
                    coords.insert(j, x.clone());
                    crate::exactalg::axpy(&mut image, x, &cols[j]);
                }
            }
            if !image.is_empty() || !span.insert(coords) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn family(&self) -> &SurfaceFamily {
        &self.family
    }

    pub fn sheaf(&self) -> Sheaf {
        self.sheaf
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn h0_dim(&self) -> usize {
        self.h0_kernel.len()
    }

    pub fn h1_dim(&self) -> usize {
        self.complement.len()
    }

    pub fn h0_basis(&self) -> &[GlobalSection] {
        &self.h0_basis
    }

    pub fn h0_kernel(&self) -> &[GlobalSection] {
        &self.h0_kernel
    }

    pub fn h1_reps(&self) -> &[Section] {
        &self.h1_reps
    }

    /// Whether the displayed bases were verified and are in use.
    pub fn uses_standard_bases(&self) -> (bool, bool) {
        (self.h0_standard, self.h1_standard)
    }

    /// Monomial representatives spanning the computed cokernel complement.
    pub fn complement_reps(&self) -> Vec<Section> {
        self.complement.iter().map(|k| Section::monomial(self.sheaf, k.comp, Rat::one(), k.exponent)).collect()
    }

    /// Components on which untwisted cocycles carry classes.
    pub fn cocycle_components(&self) -> &[usize] {
        &self.cocycle_components
    }

    /// Window coordinates of an overlap cochain in the chart-1 frame.
    fn window_vector(&self, cocycle: &Section) -> Result<SparseVec> {
        if cocycle.sheaf() != self.sheaf {
            return Err(Error::IllFormedSection(format!("expected a {} cochain", self.sheaf)));
        }
        let mut v = SparseVec::new();
        for (comp, x) in cocycle.components().iter().enumerate() {
            // on the other components the cochain is a cocycle of a
            // nontrivial degree-0 line bundle, whose H^1 vanishes
            if !self.cocycle_components.contains(&comp) {
                continue;
            }
            for (m, part) in x.parts() {
                if m != 0 {
                    if !part.is_zero() {
                        return Err(Error::IllFormedSection(format!(
                            "twisted part E^{} in component {} is outside the cochain ansatz",
                            m,
                            self.sheaf.component_label(comp)
                        )));
                    }
                    continue;
                }
                if let Some(p) = part.precision() {
                    if p < -1 {
                        return Err(Error::UntrustedWindow { exponent: -1, trusted: p.to_string() });
                    }
                }
                for (e, c) in part.terms() {
                    if e >= 0 {
                        continue;
                    }
                    if e < -self.truncation.m {
                        return Err(Error::UntrustedWindow { exponent: e, trusted: format!(">= {}", -self.truncation.m) });
                    }
                    v.insert(self.window_index[&RowKey { comp, e_degree: 0, exponent: e }], c.clone());
                }
            }
        }
        Ok(v)
    }

    fn complement_coordinates(&self, cocycle: &Section) -> Result<Vec<Rat>> {
        let nf = self.basis.reduce(&self.window_vector(cocycle)?);
        Ok(self
            .complement
            .iter()
            .map(|k| nf.get(&self.window_index[k]).cloned().unwrap_or_else(Rat::zero))
            .collect())
    }

    /// Coordinates of the class of `cocycle` in `h1_reps`.
    pub fn reduce_class(&self, cocycle: &Section) -> Result<Vec<Rat>> {
        let c = self.complement_coordinates(cocycle)?;
        if self.h1_dim() == 0 {
            return Ok(Vec::new());
        }
        self.rep_matrix
            .solve(&c)
            .ok_or_else(|| Error::InvalidStructure("representative matrix is not invertible".into()))
    }

    /// Whether `cocycle` is a coboundary.
    pub fn is_coboundary(&self, cocycle: &Section) -> Result<bool> {
        Ok(self.complement_coordinates(cocycle)?.iter().all(Zero::is_zero))
    }

    /// The cocycle `sum coords_i * rep_i`.
    pub fn class_section(&self, coords: &[Rat]) -> Result<Section> {
        let mut out = Section::zero(self.sheaf);
        for (c, r) in coords.iter().zip(&self.h1_reps) {
            out = out.add(&r.scale(c))?;
        }
        Ok(out)
    }

    /// Coordinates in `h0_basis` of a global section given in chart 0 by
    /// expanded coefficients.
    pub fn h0_coordinates(&self, chart0: &Section) -> Result<Vec<Rat>> {
        let hi = chart0.precision().unwrap_or(self.truncation.n).min(self.truncation.n);
        let basis = self
            .h0_basis
            .iter()
            .map(|g| g.chart0(self.family.elliptic(), hi))
            .collect::<Result<Vec<_>>>()?;
        let target: Vec<LaurentSeries> = chart0.components().iter().map(untwisted).collect::<Result<_>>()?;
        let lo = target
            .iter()
            .chain(basis.iter().flat_map(|b| b.components()).map(|x| x.part(0)).collect::<Vec<_>>().iter())
            .filter_map(LaurentSeries::valuation)
            .min()
            .unwrap_or(0)
            .min(0);
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for comp in 0..self.sheaf.components() {
            for e in lo..=hi {
                rows.push(basis.iter().map(|b| b.components()[comp].part(0).coeff(e)).collect::<Result<Vec<_>>>()?);
                rhs.push(target[comp].coeff(e)?);
            }
        }
        let m = RatMatrix::from_rows(rows);
        if self.h0_basis.is_empty() {
            return if rhs.iter().all(Zero::is_zero) {
                Ok(Vec::new())
            } else {
                Err(Error::InvalidStructure("section is not global: H^0 is zero".into()))
            };
        }
        m.solve(&rhs).ok_or_else(|| Error::InvalidStructure("section is not a combination of the H^0 basis".into()))
    }

    /// Whether a chart-0 combination of basis functions is holomorphic
    /// after pushing to chart 1.
    pub fn is_global(&self, g: &GlobalSection) -> Result<bool> {
        let s = g.chart1(&self.family, 0)?;
        for x in s.components() {
            for (m, part) in x.parts() {
                if part.is_zero() {
                    continue;
                }
                if m != 0 || part.valuation().is_some_and(|v| v < 0) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn untwisted(x: &TwistedLaurent) -> Result<LaurentSeries> {
    x.untwisted()
}

fn wp(k: usize, c: Rat) -> EllipticFunction {
    EllipticFunction::wp(k, c)
}

fn konst(c: i64) -> EllipticFunction {
    EllipticFunction::constant(int(c))
}

/// Bases of `H^0` written the classical way.
pub fn standard_h0_basis(family: &SurfaceFamily, sheaf: Sheaf) -> Vec<GlobalSection> {
    let single = |comp: usize, f: EllipticFunction| GlobalSection::single(sheaf, comp, f);
    match (family.variant(), sheaf) {
        (Variant::S0, Sheaf::Theta) => (0..4).map(|c| single(c, konst(1))).collect(),
        (Variant::S0, Sheaf::Wedge2Theta) => (0..3).map(|c| single(c, konst(1))).collect(),
        (Variant::Twisted { t0 }, Sheaf::Theta) => vec![
            single(2, konst(1)),
            GlobalSection { sheaf, coeffs: vec![konst(1), EllipticFunction::zero(), wp(0, -t0.clone()), EllipticFunction::zero()] },
        ],
        (Variant::Twisted { .. }, Sheaf::Wedge2Theta) => vec![single(1, konst(1))],
        (Variant::Sn { n }, _) => {
            let (c1, c2) = match sheaf {
                Sheaf::Theta => (2, 3),
                Sheaf::Wedge2Theta => (1, 2),
            };
            let mut v = vec![single(c1, konst(1)), single(c2, konst(1))];
            for k in 0..(*n as usize).saturating_sub(1) {
                v.push(single(c2, wp(k, int(1))));
            }
            v
        }
        (Variant::A0, Sheaf::Theta) => vec![
            single(1, konst(1)),
            GlobalSection { sheaf, coeffs: vec![konst(1), wp(0, int(-1)), EllipticFunction::zero(), EllipticFunction::zero()] },
        ],
        (Variant::A0, Sheaf::Wedge2Theta) => vec![single(0, konst(1))],
        (Variant::Aminus1, Sheaf::Theta) => {
            vec![GlobalSection { sheaf, coeffs: vec![konst(2), wp(0, int(-3)), EllipticFunction::zero(), konst(1)] }]
        }
        (Variant::Aminus1, Sheaf::Wedge2Theta) => Vec::new(),
    }
}

/// `H^1` representatives written the classical way, in the chart-1 frame.
pub fn standard_h1_reps(family: &SurfaceFamily, sheaf: Sheaf) -> Vec<Section> {
    let mono = |comp: usize, e: i64| Section::monomial(sheaf, comp, Rat::one(), e);
    match (family.variant(), sheaf) {
        (Variant::S0, Sheaf::Theta) => (0..4).map(|c| mono(c, -1)).collect(),
        (Variant::S0, Sheaf::Wedge2Theta) => (0..3).map(|c| mono(c, -1)).collect(),
        (Variant::Twisted { .. }, Sheaf::Theta) => vec![mono(0, -1), mono(2, -1)],
        (Variant::Twisted { .. }, Sheaf::Wedge2Theta) => vec![mono(1, -1)],
        (Variant::Sn { n }, _) => {
            let n = *n as i64;
            let (first, fibre) = match sheaf {
                Sheaf::Theta => (mono(0, -1), 1),
                Sheaf::Wedge2Theta => (mono(1, -1), 0),
            };
            let mut v = vec![first, mono(fibre, -(n + 1))];
            for k in 1..n {
                v.push(mono(fibre, -k));
            }
            v
        }
        (Variant::A0, Sheaf::Theta) => {
            let comps = vec![
                TwistedLaurent::zero(),
                TwistedLaurent::zero(),
                TwistedLaurent::monomial(int(-1), -2),
                TwistedLaurent::monomial(int(-1), -1),
            ];
            vec![mono(0, -1), Section::from_components(sheaf, comps)]
        }
        (Variant::A0, Sheaf::Wedge2Theta) => vec![mono(2, -1)],
        (Variant::Aminus1, Sheaf::Theta) => vec![mono(0, -1)],
        (Variant::Aminus1, Sheaf::Wedge2Theta) => Vec::new(),
    }
}

type CacheKey = (String, Sheaf, Truncation);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<CohomologyPresentation>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<CohomologyPresentation>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized [`CohomologyPresentation::build`].
pub fn presentation(family: &SurfaceFamily, sheaf: Sheaf, tr: &Truncation) -> Result<Arc<CohomologyPresentation>> {
    let key = (format!("{:?}", family), sheaf, *tr);
    if let Some(p) = cache().lock().expect("cache lock").get(&key) {
        return Ok(p.clone());
    }
    let p = Arc::new(CohomologyPresentation::build(family, sheaf, tr)?);
    cache().lock().expect("cache lock").insert(key, p.clone());
    Ok(p)
}

/// Global sections spanning `H^0`.
pub fn h0(family: &SurfaceFamily, sheaf: Sheaf, tr: &Truncation) -> Result<Vec<GlobalSection>> {
    Ok(presentation(family, sheaf, tr)?.h0_basis().to_vec())
}

pub fn h1(family: &SurfaceFamily, sheaf: Sheaf, tr: &Truncation) -> Result<Arc<CohomologyPresentation>> {
    presentation(family, sheaf, tr)
}

pub fn reduce_class(pres: &CohomologyPresentation, cocycle: &Section) -> Result<Vec<Rat>> {
    pres.reduce_class(cocycle)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilization {
    pub dims: (usize, usize),
    pub doubled_dims: (usize, usize),
    pub certified: bool,
}

/// Dimensions at `tr` and at the doubled truncation.
pub fn stabilize(family: &SurfaceFamily, sheaf: Sheaf, tr: &Truncation) -> Result<Stabilization> {
    let a = presentation(family, sheaf, tr)?;
    let b = presentation(family, sheaf, &tr.doubled())?;
    let dims = (a.h0_dim(), a.h1_dim());
    let doubled_dims = (b.h0_dim(), b.h1_dim());
    Ok(Stabilization { dims, doubled_dims, certified: dims == doubled_dims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn e() -> EllipticParams {
        EllipticParams::default()
    }

    fn dims(f: &SurfaceFamily, s: Sheaf) -> (usize, usize) {
        let p = presentation(f, s, &Truncation::default_for(f)).unwrap();
        (p.h0_dim(), p.h1_dim())
    }

    #[test]
    fn s0_dimensions() {
        let f = SurfaceFamily::s0(e());
        assert_eq!(dims(&f, Sheaf::Theta), (4, 4));
        assert_eq!(dims(&f, Sheaf::Wedge2Theta), (3, 3));
    }

    #[test]
    fn sheaf_dimensions_per_family() {
        let t = SurfaceFamily::twisted(rat(2, 3), e()).unwrap();
        assert_eq!(dims(&t, Sheaf::Theta), (2, 2));
        assert_eq!(dims(&t, Sheaf::Wedge2Theta), (1, 1));
        for n in 1..=3 {
            let s = SurfaceFamily::sn(n, e()).unwrap();
            let k = n as usize + 1;
            assert_eq!(dims(&s, Sheaf::Theta), (k, k));
            assert_eq!(dims(&s, Sheaf::Wedge2Theta), (k, k));
        }
        let a0 = SurfaceFamily::a0(e());
        assert_eq!(dims(&a0, Sheaf::Theta), (2, 2));
        assert_eq!(dims(&a0, Sheaf::Wedge2Theta), (1, 1));
        let am1 = SurfaceFamily::aminus1(e());
        assert_eq!(dims(&am1, Sheaf::Theta), (1, 1));
        assert_eq!(dims(&am1, Sheaf::Wedge2Theta), (0, 0));
    }

    #[test]
    fn standard_bases_verify() {
        let fams = vec![
            SurfaceFamily::s0(e()),
            SurfaceFamily::twisted(rat(-5, 7), e()).unwrap(),
            SurfaceFamily::sn(2, e()).unwrap(),
            SurfaceFamily::sn(4, e()).unwrap(),
            SurfaceFamily::a0(e()),
            SurfaceFamily::aminus1(e()),
        ];
        for f in fams {
            for s in [Sheaf::Theta, Sheaf::Wedge2Theta] {
                let p = presentation(&f, s, &Truncation::default_for(&f)).unwrap();
                assert_eq!(p.uses_standard_bases(), (true, true), "{} {}", f, s);
                for (i, r) in p.h1_reps().iter().enumerate() {
                    let c = p.reduce_class(r).unwrap();
                    let unit: Vec<Rat> = (0..c.len()).map(|j| if i == j { int(1) } else { int(0) }).collect();
                    assert_eq!(c, unit);
                }
            }
        }
    }

    #[test]
    fn dense_matrix_agrees_with_sparse_kernel() {
        for f in [SurfaceFamily::s0(e()), SurfaceFamily::aminus1(e()), SurfaceFamily::sn(3, e()).unwrap()] {
            let tr = Truncation::default_for(&f);
            let m = coboundary_matrix(&f, Sheaf::Theta, &tr).unwrap();
            assert_eq!(m.kernel_basis().len(), dims(&f, Sheaf::Theta).0, "{}", f);
        }
        let am1 = SurfaceFamily::aminus1(e());
        let m = coboundary_matrix(&am1, Sheaf::Wedge2Theta, &Truncation::default_for(&am1)).unwrap();
        assert!(m.kernel_basis().is_empty());
    }

    #[test]
    fn coboundaries_reduce_to_zero() {
        let f = SurfaceFamily::s0(e());
        let p = presentation(&f, Sheaf::Wedge2Theta, &Truncation::default_for(&f)).unwrap();
        // -(t0/u1^2)(A + B xi1 + C xi1^2)
        let t0 = rat(3, 4);
        let comps = [int(2), int(-1), rat(1, 3)]
            .iter()
            .map(|c| TwistedLaurent::monomial(-&t0 * c, -2))
            .collect();
        let s = Section::from_components(Sheaf::Wedge2Theta, comps);
        assert_eq!(p.reduce_class(&s).unwrap(), vec![int(0); 3]);
        let t = SurfaceFamily::twisted(rat(1, 2), e()).unwrap();
        let p = presentation(&t, Sheaf::Wedge2Theta, &Truncation::default_for(&t)).unwrap();
        let s = Section::monomial(Sheaf::Wedge2Theta, 1, int(-5), -2);
        assert_eq!(p.reduce_class(&s).unwrap(), vec![int(0)]);
    }

    #[test]
    fn window_overflow_is_an_error() {
        let f = SurfaceFamily::s0(e());
        let tr = Truncation::default_for(&f);
        let p = presentation(&f, Sheaf::Theta, &tr).unwrap();
        let deep = Section::monomial(Sheaf::Theta, 0, int(1), -tr.m - 1);
        assert!(matches!(p.reduce_class(&deep), Err(Error::UntrustedWindow { .. })));
    }

    #[test]
    fn stabilization_certifies() {
        let f = SurfaceFamily::sn(2, e()).unwrap();
        let s = stabilize(&f, Sheaf::Theta, &Truncation::default_for(&f)).unwrap();
        assert_eq!(s.dims, (3, 3));
        assert!(s.certified);
        let mut wider = Truncation::default_for(&f);
        wider.n *= 2;
        let p = presentation(&f, Sheaf::Theta, &wider).unwrap();
        assert_eq!((p.h0_dim(), p.h1_dim()), (3, 3));
    }

    #[test]
    fn aminus1_section_display() {
        let f = SurfaceFamily::aminus1(e());
        let b = h0(&f, Sheaf::Theta, &Truncation::default_for(&f)).unwrap();
        assert_eq!(b[0].to_string(), "2*d_u - 3*wp*d_xi + xi^2*d_xi");
    }
}
