//! Vector and bivector fields on one chart, with Lie and Schouten brackets.
//!
//! A chart has a fibre coordinate `xi` and a base coordinate whose
//! coefficients are expanded in `u1`. Coefficients are polynomials in `xi`
//! over [`TwistedLaurent`]; `d/du` acts on them as the twisted derivative.

use std::fmt;

use crate::error::{Error, Result};
use crate::exactalg::{fmt_rat_term, LaurentSeries, Rat, TwistedLaurent};

/// Polynomial in `xi` with [`TwistedLaurent`] coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ChartFunction {
    xi_coeffs: Vec<TwistedLaurent>,
}

impl ChartFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(xi_coeffs: Vec<TwistedLaurent>) -> Self {
        let mut f = ChartFunction { xi_coeffs };
        f.trim();
        f
    }

    pub fn constant(c: TwistedLaurent) -> Self {
        Self::new(vec![c])
    }

    /// `c * xi^j`.
    pub fn monomial(c: TwistedLaurent, j: usize) -> Self {
        let mut v = vec![TwistedLaurent::zero(); j + 1];
        v[j] = c;
        Self::new(v)
    }

    /// Polynomial in `xi` with plain series coefficients.
    pub fn from_series(coeffs: Vec<LaurentSeries>) -> Self {
        Self::new(coeffs.into_iter().map(TwistedLaurent::plain).collect())
    }

    fn trim(&mut self) {
        while self.xi_coeffs.last().is_some_and(|c| c.is_zero() && c.precision().is_none()) {
            self.xi_coeffs.pop();
        }
    }

    /// Degree in `xi`, `None` for the zero function.
    pub fn degree(&self) -> Option<usize> {
        self.xi_coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn coeff(&self, j: usize) -> TwistedLaurent {
        self.xi_coeffs.get(j).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[TwistedLaurent] {
        &self.xi_coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.xi_coeffs.iter().all(TwistedLaurent::is_zero)
    }

    pub fn precision(&self) -> Option<i64> {
        self.xi_coeffs.iter().filter_map(TwistedLaurent::precision).min()
    }

    pub fn truncate(&self, hi: i64) -> Self {
        Self::new(self.xi_coeffs.iter().map(|c| c.truncate(hi)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.xi_coeffs.len().max(other.xi_coeffs.len());
        Self::new((0..n).map(|j| self.coeff(j).add(&other.coeff(j))).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.xi_coeffs.iter().map(TwistedLaurent::neg).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.xi_coeffs.iter().map(|x| x.scale(c)).collect())
    }

    /// Multiply every coefficient by a function of the base coordinate.
    pub fn mul_base(&self, c: &TwistedLaurent) -> Self {
        Self::new(self.xi_coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.xi_coeffs.is_empty() || other.xi_coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![TwistedLaurent::zero(); self.xi_coeffs.len() + other.xi_coeffs.len() - 1];
        for (i, a) in self.xi_coeffs.iter().enumerate() {
            for (j, b) in other.xi_coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::constant(TwistedLaurent::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn d_xi(&self) -> Self {
        Self::new(
            self.xi_coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.scale(&Rat::from_integer((j as i64).into())))
                .collect(),
        )
    }

    /// `d/du` at fixed `xi`, with `t0` the twist of the `E` generator.
    pub fn d_u(&self, t0: &Rat) -> Self {
        Self::new(self.xi_coeffs.iter().map(|c| c.derivative(t0)).collect())
    }
}

fn check_cap(f: &ChartFunction, cap: usize, what: &str) -> Result<()> {
    match f.degree() {
        Some(d) if d > cap => {
            Err(Error::IllFormedSection(format!("{} has xi-degree {} (at most {} allowed)", what, d, cap)))
        }
        _ => Ok(()),
    }
}

/// `u_part * d/du + xi_part * d/dxi` with `deg xi_part <= 2`, `deg u_part <= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VectorField {
    u_part: ChartFunction,
    xi_part: ChartFunction,
}

impl VectorField {
    pub fn new(u_part: ChartFunction, xi_part: ChartFunction) -> Result<Self> {
        check_cap(&u_part, 0, "d_u coefficient")?;
        check_cap(&xi_part, 2, "d_xi coefficient")?;
        Ok(VectorField { u_part, xi_part })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `b d/du + (a0 + a1 xi + a2 xi^2) d/dxi` from plain series.
    pub fn from_series(b: LaurentSeries, a: [LaurentSeries; 3]) -> Self {
        VectorField {
            u_part: ChartFunction::from_series(vec![b]),
            xi_part: ChartFunction::from_series(a.to_vec()),
        }
    }

    pub fn u_part(&self) -> &ChartFunction {
        &self.u_part
    }

    pub fn xi_part(&self) -> &ChartFunction {
        &self.xi_part
    }

    pub fn is_zero(&self) -> bool {
        self.u_part.is_zero() && self.xi_part.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        VectorField { u_part: self.u_part.add(&other.u_part), xi_part: self.xi_part.add(&other.xi_part) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        VectorField { u_part: self.u_part.sub(&other.u_part), xi_part: self.xi_part.sub(&other.xi_part) }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        VectorField { u_part: self.u_part.scale(c), xi_part: self.xi_part.scale(c) }
    }

    pub fn truncate(&self, hi: i64) -> Self {
        VectorField { u_part: self.u_part.truncate(hi), xi_part: self.xi_part.truncate(hi) }
    }

    pub fn precision(&self) -> Option<i64> {
        [self.u_part.precision(), self.xi_part.precision()].into_iter().flatten().min()
    }

    /// Derivative of `f` along this field.
    pub fn apply(&self, f: &ChartFunction, t0: &Rat) -> ChartFunction {
        self.u_part.mul(&f.d_u(t0)).add(&self.xi_part.mul(&f.d_xi()))
    }
}

/// `h * d/dxi ^ d/du` with `deg h <= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Bivector {
    h: ChartFunction,
}

impl Bivector {
    pub fn new(h: ChartFunction) -> Result<Self> {
        check_cap(&h, 2, "bivector coefficient")?;
        Ok(Bivector { h })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_series(h: [LaurentSeries; 3]) -> Self {
        Bivector { h: ChartFunction::from_series(h.to_vec()) }
    }

    pub fn h(&self) -> &ChartFunction {
        &self.h
    }

    pub fn is_zero(&self) -> bool {
        self.h.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Bivector { h: self.h.add(&other.h) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Bivector { h: self.h.sub(&other.h) }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Bivector { h: self.h.scale(c) }
    }

    pub fn truncate(&self, hi: i64) -> Self {
        Bivector { h: self.h.truncate(hi) }
    }

    pub fn precision(&self) -> Option<i64> {
        self.h.precision()
    }
}

/// Result of bracketing two bivectors on a surface: every 3-vector vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZeroTrivector;

/// `[v, w] = v(w) - w(v)` in coordinates.
pub fn lie_bracket(v: &VectorField, w: &VectorField, t0: &Rat) -> Result<VectorField> {
    let u_part = v.apply(&w.u_part, t0).sub(&w.apply(&v.u_part, t0));
    let xi_part = v.apply(&w.xi_part, t0).sub(&w.apply(&v.xi_part, t0));
    VectorField::new(u_part, xi_part)
}

/// `[h d_xi^d_u, f d_u + g d_xi] = (h (g_xi + f_u) - f h_u - g h_xi) d_xi^d_u`.
pub fn schouten_bv(l: &Bivector, v: &VectorField, t0: &Rat) -> Result<Bivector> {
    let h = &l.h;
    let (f, g) = (&v.u_part, &v.xi_part);
    let div = g.d_xi().add(&f.d_u(t0));
    let out = h.mul(&div).sub(&f.mul(&h.d_u(t0))).sub(&g.mul(&h.d_xi()));
    Bivector::new(out)
}

pub fn schouten_bb(_l1: &Bivector, _l2: &Bivector) -> ZeroTrivector {
    ZeroTrivector
}

/// Writes `coeff * xi^j * gen` as a flat sum of monomials.
fn fmt_terms(
    f: &mut fmt::Formatter<'_>,
    first: &mut bool,
    prec: &mut Option<i64>,
    coeff: &ChartFunction,
    gen: &str,
) -> fmt::Result {
    for (j, c) in coeff.coeffs().iter().enumerate() {
        for (m, s) in c.parts() {
            if let Some(h) = s.precision() {
                *prec = Some(prec.map_or(h, |p| p.min(h)));
            }
            for (e, x) in s.terms() {
                let mut body: Vec<String> = Vec::new();
                if m != 0 {
                    body.push(format!("E^{}", m));
                }
                if e != 0 {
                    body.push(format!("u1^{}", e));
                }
                match j {
                    0 => {}
                    1 => body.push("xi".into()),
                    _ => body.push(format!("xi^{}", j)),
                }
                if !gen.is_empty() {
                    body.push(gen.into());
                }
                fmt_rat_term(f, *first, x, &body.join("*"))?;
                *first = false;
            }
        }
    }
    Ok(())
}

fn finish(f: &mut fmt::Formatter<'_>, first: bool, prec: Option<i64>) -> fmt::Result {
    if first {
        write!(f, "0")?;
    }
    if let Some(h) = prec {
        write!(f, " + O(u1^{})", h + 1)?;
    }
    Ok(())
}

impl fmt::Display for ChartFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (mut first, mut prec) = (true, None);
        fmt_terms(f, &mut first, &mut prec, self, "")?;
        finish(f, first, prec)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (mut first, mut prec) = (true, None);
        fmt_terms(f, &mut first, &mut prec, &self.u_part, "d_u")?;
        fmt_terms(f, &mut first, &mut prec, &self.xi_part, "d_xi")?;
        finish(f, first, prec)
    }
}

impl fmt::Display for Bivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (mut first, mut prec) = (true, None);
        fmt_terms(f, &mut first, &mut prec, &self.h, "d_xi^d_u")?;
        finish(f, first, prec)
    }
}
