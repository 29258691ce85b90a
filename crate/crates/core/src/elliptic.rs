//! Elliptic functions with poles only at the base point `p`.
//!
//! The modulus enters only through the Weierstrass invariants `(g2, g3)`.
//! Every function is a finite combination of `1, wp, wp', ..., wp^(K)`
//! expanded in the local coordinate `u1 = u - p`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{fmt_rat_term, int, rat, LaurentSeries, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticParams {
    g2: Rat,
    g3: Rat,
}

impl EllipticParams {
    pub fn new(g2: Rat, g3: Rat) -> Result<Self> {
        let disc = &g2 * &g2 * &g2 - int(27) * &g3 * &g3;
        if disc.is_zero() {
            return Err(Error::InvalidParameters(format!("discriminant vanishes for g2={}, g3={}", g2, g3)));
        }
        Ok(EllipticParams { g2, g3 })
    }

    pub fn g2(&self) -> &Rat {
        &self.g2
    }

    pub fn g3(&self) -> &Rat {
        &self.g3
    }

    /// Laurent coefficients `a_k` of `wp = u^-2 + sum_{k>=2} a_k u^(2k-2)`,
    /// indexed by `k` (entries 0 and 1 are unused zeros).
    fn coefficients(&self, kmax: usize) -> Vec<Rat> {
        let mut a = vec![Rat::zero(); kmax.max(3) + 1];
        a[2] = &self.g2 / int(20);
        a[3] = &self.g3 / int(28);
        for k in 4..=kmax {
            let mut acc = Rat::zero();
            for m in 2..=(k - 2) {
                acc += &a[m] * &a[k - m];
            }
            a[k] = acc * rat(3, ((2 * k + 1) * (k - 3)) as i64);
        }
        a.truncate(kmax + 1);
        a
    }
}

impl Default for EllipticParams {
    /// A fixed generic curve used when no invariants are supplied.
    fn default() -> Self {
        EllipticParams::new(rat(7, 3), rat(5, 11)).expect("nonsingular")
    }
}

/// Expansion of `wp` at the pole, trusted through `u1^order`.
pub fn wp_expansion(params: &EllipticParams, order: i64) -> Result<LaurentSeries> {
    if order < -2 {
        return Err(Error::InvalidParameters(format!("expansion order {} below the pole order", order)));
    }
    // u^(2k-2) <= order
    let kmax = ((order + 2) / 2).max(0) as usize;
    let a = params.coefficients(kmax);
    let len = (order + 3) as usize;
    let mut coeffs = vec![Rat::zero(); len];
    coeffs[0] = Rat::one();
    for (k, ak) in a.iter().enumerate().skip(2) {
        let e = 2 * k as i64 - 2;
        if e <= order {
            coeffs[(e + 2) as usize] = ak.clone();
        }
    }
    Ok(LaurentSeries::truncated(-2, coeffs, order))
}

/// Expansions of `wp^(0), ..., wp^(kmax)`, each trusted through `u1^order`.
pub fn wp_derivative_tower(params: &EllipticParams, kmax: usize, order: i64) -> Result<Vec<LaurentSeries>> {
    let mut cur = wp_expansion(params, order + kmax as i64)?;
    let mut out = Vec::with_capacity(kmax + 1);
    for _ in 0..=kmax {
        let next = cur.derivative();
        out.push(cur.truncate(order));
        cur = next;
    }
    Ok(out)
}

/// `constant + sum_k wp_coeffs[k] * wp^(k)(u - p)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EllipticFunction {
    pub constant: Rat,
    pub wp_coeffs: Vec<Rat>,
}

impl EllipticFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        EllipticFunction { constant: c, wp_coeffs: Vec::new() }
    }

    /// The single function `c * wp^(k)`.
    pub fn wp(k: usize, c: Rat) -> Self {
        let mut wp_coeffs = vec![Rat::zero(); k + 1];
        wp_coeffs[k] = c;
        EllipticFunction { constant: Rat::zero(), wp_coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.wp_coeffs.iter().all(Zero::is_zero)
    }

    /// Pole order at `p` (0 for constants).
    pub fn pole_order(&self) -> usize {
        self.wp_coeffs.iter().rposition(|c| !c.is_zero()).map_or(0, |k| k + 2)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.wp_coeffs.len().max(other.wp_coeffs.len());
        let get = |v: &Vec<Rat>, k: usize| v.get(k).cloned().unwrap_or_else(Rat::zero);
        EllipticFunction {
            constant: &self.constant + &other.constant,
            wp_coeffs: (0..n).map(|k| get(&self.wp_coeffs, k) + get(&other.wp_coeffs, k)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        EllipticFunction { constant: &self.constant * c, wp_coeffs: self.wp_coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn derivative(&self) -> Self {
        let mut wp_coeffs = vec![Rat::zero()];
        wp_coeffs.extend(self.wp_coeffs.iter().cloned());
        EllipticFunction { constant: Rat::zero(), wp_coeffs }
    }

    /// Expansion at `u1 = 0` trusted through `u1^order`.
    pub fn to_series(&self, params: &EllipticParams, order: i64) -> Result<LaurentSeries> {
        elliptic_to_series(self, params, order)
    }
}

pub fn elliptic_to_series(f: &EllipticFunction, params: &EllipticParams, order: i64) -> Result<LaurentSeries> {
    let kmax = f.wp_coeffs.len().saturating_sub(1);
    let mut out = LaurentSeries::constant(f.constant.clone()).truncate(order);
    if f.wp_coeffs.iter().all(Zero::is_zero) {
        return Ok(out);
    }
    let tower = wp_derivative_tower(params, kmax, order)?;
    for (c, s) in f.wp_coeffs.iter().zip(&tower) {
        if !c.is_zero() {
            out = &out + &s.scale(c);
        }
    }
    Ok(out)
}

/// The single principal term of `wp^(k)` is `(-1)^k (k+1)! u1^(-k-2)`.
pub fn wp_principal_coefficient(k: usize) -> Rat {
    let fact: Rat = (1..=(k as i64 + 1)).map(int).product();
    if k % 2 == 0 {
        fact
    } else {
        -fact
    }
}

/// Coefficient of `u1^-1`.
pub fn residue(s: &LaurentSeries) -> Result<Rat> {
    s.coeff(-1)
}

/// The elliptic function with constant term 0 whose principal part at `p`
/// is exactly `pp`.
///
/// Fails with [`Error::OrderOnePole`] when `pp` has a `u1^-1` term: there is
/// no elliptic function with a single simple pole.
pub fn realize_principal_part(pp: &LaurentSeries, _params: &EllipticParams) -> Result<EllipticFunction> {
    if pp.terms().any(|(e, _)| e >= 0) {
        return Err(Error::InvalidParameters("principal part must contain only negative exponents".into()));
    }
    let res = residue(pp)?;
    if !res.is_zero() {
        return Err(Error::OrderOnePole { residue: res.to_string() });
    }
    let depth = pp.valuation().map_or(0, |v| (-v) as usize);
    if depth < 2 {
        return Ok(EllipticFunction::zero());
    }
    // each wp^(k) contributes exactly one negative-degree term, so the
    // triangular solve is a termwise division
    let mut wp_coeffs = vec![Rat::zero(); depth - 1];
    for (e, c) in pp.terms() {
        let k = (-e - 2) as usize;
        wp_coeffs[k] = c / wp_principal_coefficient(k);
    }
    Ok(EllipticFunction { constant: Rat::zero(), wp_coeffs })
}

impl fmt::Display for EllipticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() {
            fmt_rat_term(f, true, &self.constant, "")?;
            first = false;
        }
        for (k, c) in self.wp_coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            fmt_rat_term(f, first, c, &wp_label(k))?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

pub fn wp_label(k: usize) -> String {
    if k == 0 {
        "wp".to_string()
    } else {
        format!("wp^({})", k)
    }
}
