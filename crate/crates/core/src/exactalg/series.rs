use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::Rat;
use crate::error::{Error, Result};

/// Truncated Laurent series in the local coordinate `u1` with exact rational
/// coefficients.
///
/// The series is exactly zero below `lo`. Coefficients are trusted through
/// `hi`; `hi == None` marks an exact Laurent polynomial. Reading a
/// coefficient above `hi` is an error, never a silent zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    lo: i64,
    coeffs: Vec<Rat>,
    hi: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl LaurentSeries {
    pub fn zero() -> Self {
        LaurentSeries { lo: 0, coeffs: Vec::new(), hi: None }
    }

    pub fn one() -> Self {
        Self::monomial(Rat::one(), 0)
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Rat, exponent: i64) -> Self {
        Self::exact(exponent, vec![c])
    }

    /// Exact Laurent polynomial `sum coeffs[i] u1^(lo+i)`.
    pub fn exact(lo: i64, coeffs: Vec<Rat>) -> Self {
        let mut s = LaurentSeries { lo, coeffs, hi: None };
        s.normalize();
        s
    }

    /// Series known through exponent `hi`.
    pub fn truncated(lo: i64, coeffs: Vec<Rat>, hi: i64) -> Self {
        let mut s = LaurentSeries { lo, coeffs, hi: Some(hi) };
        s.normalize();
        s
    }

    /// Exact polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents accumulate.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(terms: I) -> Self {
        let terms: Vec<(i64, Rat)> = terms.into_iter().collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let top = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Rat::zero(); (top - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::exact(lo, coeffs)
    }

    fn normalize(&mut self) {
        if let Some(hi) = self.hi {
            let keep = (hi - self.lo + 1).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            match self.hi {
                None => self.lo = 0,
                Some(hi) => self.lo = hi + 1,
            }
        }
    }

    /// `(lo, hi)`: zero below `lo`, trusted through `hi` (`None` = exact).
    pub fn window(&self) -> (i64, Option<i64>) {
        (self.lo, self.hi)
    }

    pub fn precision(&self) -> Option<i64> {
        self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.hi.is_none()
    }

    /// Exponent of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.lo)
        }
    }

    /// Largest exponent carrying a stored nonzero coefficient.
    pub fn top_exponent(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.lo + self.coeffs.len() as i64 - 1)
        }
    }

    /// True when every trusted coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exponent: i64) -> Result<Rat> {
        if let Some(hi) = self.hi {
            if exponent > hi {
                return Err(Error::UntrustedWindow { exponent, trusted: hi.to_string() });
            }
        }
        Ok(self.coeff_unchecked(exponent))
    }

    fn coeff_unchecked(&self, exponent: i64) -> Rat {
        if exponent < self.lo {
            return Rat::zero();
        }
        self.coeffs.get((exponent - self.lo) as usize).cloned().unwrap_or_else(Rat::zero)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.lo + i as i64, c))
    }

    /// Drop everything above `hi`, lowering the precision accordingly.
    pub fn truncate(&self, hi: i64) -> Self {
        let hi = match self.hi {
            Some(h) => h.min(hi),
            None => hi,
        };
        LaurentSeries::truncated(self.lo, self.coeffs.clone(), hi)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return match self.hi {
                None => Self::zero(),
                Some(hi) => LaurentSeries::truncated(hi + 1, Vec::new(), hi),
            };
        }
        LaurentSeries { lo: self.lo, coeffs: self.coeffs.iter().map(|x| x * c).collect(), hi: self.hi }
    }

    /// Multiply by `u1^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        let mut out = self.clone();
        out.lo += shift;
        out.hi = self.hi.map(|h| h + shift);
        out
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let hi = min_prec(self.hi, other.hi);
        let lo = self.lo.min(other.lo);
        let mut top = lo - 1;
        if let Some(t) = self.top_exponent() {
            top = top.max(t);
        }
        if let Some(t) = other.top_exponent() {
            top = top.max(t);
        }
        if let Some(h) = hi {
            top = top.min(h);
        }
        let len = (top - lo + 1).max(0) as usize;
        let mut coeffs = vec![Rat::zero(); len];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            let e = lo + i as i64;
            *slot = self.coeff_unchecked(e) + other.coeff_unchecked(e);
        }
        let mut out = LaurentSeries { lo, coeffs, hi };
        out.normalize();
        out
    }

    pub fn mul_series(&self, other: &Self) -> Self {
        // an exact zero annihilates regardless of precision
        if (self.is_zero() && self.is_exact()) || (other.is_zero() && other.is_exact()) {
            return Self::zero();
        }
        let lo = self.lo + other.lo;
        let hi = min_prec(self.hi.map(|h| h + other.lo), other.hi.map(|h| h + self.lo));
        let mut top = lo + self.coeffs.len() as i64 + other.coeffs.len() as i64 - 2;
        if let Some(h) = hi {
            top = top.min(h);
        }
        let len = (top - lo + 1).max(0) as usize;
        let mut coeffs = vec![Rat::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        let mut out = LaurentSeries { lo, coeffs, hi };
        out.normalize();
        out
    }

    /// Termwise `d/du1`; the window moves down by one.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Rat::from_integer((self.lo + i as i64).into()))
            .collect();
        let mut out = LaurentSeries { lo: self.lo - 1, coeffs, hi: self.hi.map(|h| h - 1) };
        out.normalize();
        out
    }

    /// Multiplicative inverse, computed through exponent `want_hi` at most.
    ///
    /// The achievable precision is limited by the precision of `self`
    /// relative to its valuation.
    pub fn inverse(&self, want_hi: i64) -> Result<Self> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::SingularTransition("inverse of a series with no trusted nonzero term".into()))?;
        let rel = match self.hi {
            Some(h) => (h - v).min(want_hi + v),
            None => want_hi + v,
        };
        let hi = -v + rel;
        if rel < 0 {
            return Ok(LaurentSeries::truncated(-v, Vec::new(), hi));
        }
        let n = rel as usize + 1;
        let lead_inv = self.coeffs[0].recip();
        let mut out = vec![Rat::zero(); n];
        out[0] = lead_inv.clone();
        for k in 1..n {
            let mut acc = Rat::zero();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                acc += &self.coeffs[j] * &out[k - j];
            }
            out[k] = -acc * &lead_inv;
        }
        // exact monomials invert exactly
        if self.hi.is_none() && self.coeffs.len() == 1 {
            return Ok(LaurentSeries::monomial(lead_inv, -v));
        }
        Ok(LaurentSeries::truncated(-v, out, hi))
    }

    /// Exact Laurent polynomial holding the terms with negative exponent.
    pub fn principal_part(&self) -> Result<Self> {
        if let Some(hi) = self.hi {
            if hi < -1 {
                return Err(Error::UntrustedWindow { exponent: -1, trusted: hi.to_string() });
            }
        }
        Ok(LaurentSeries::from_terms(self.terms().filter(|(e, _)| *e < 0).map(|(e, c)| (e, c.clone()))))
    }

    /// Exact equality on the common trusted range.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub_series(other).is_zero()
    }

    pub fn sub_series(&self, other: &Self) -> Self {
        self.add_series(&other.neg_series())
    }

    pub fn neg_series(&self) -> Self {
        LaurentSeries { lo: self.lo, coeffs: self.coeffs.iter().map(|c| -c).collect(), hi: self.hi }
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.add_series(rhs)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.sub_series(rhs)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.mul_series(rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.neg_series()
    }
}

pub(crate) fn fmt_rat_term(f: &mut fmt::Formatter<'_>, first: bool, c: &Rat, body: &str) -> fmt::Result {
    let neg = c.is_negative();
    let mag = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if body.is_empty() {
        write!(f, "{}", mag)
    } else if mag.is_one() {
        write!(f, "{}", body)
    } else {
        write!(f, "{}*{}", mag, body)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let body = match e {
                0 => String::new(),
                1 => "u1".to_string(),
                _ => format!("u1^{}", e),
            };
            fmt_rat_term(f, first, c, &body)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(hi) = self.hi {
            write!(f, " + O(u1^{})", hi + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn s(lo: i64, c: &[i64], hi: i64) -> LaurentSeries {
        LaurentSeries::truncated(lo, c.iter().map(|&x| rat(x, 1)).collect(), hi)
    }

    #[test]
    fn polynomial_product() {
        let a = s(0, &[1, 1], 5);
        let b = s(0, &[1, -1], 5);
        let p = &a * &b;
        assert_eq!(p, s(0, &[1, 0, -1], 5));
        assert_eq!(p.window(), (0, Some(5)));
    }

    #[test]
    fn inverse_monomials() {
        let a = LaurentSeries::monomial(rat(1, 1), -1);
        let b = LaurentSeries::monomial(rat(1, 1), 1);
        assert_eq!(&a * &b, LaurentSeries::one());
    }

    #[test]
    fn window_of_product_with_exact_monomial() {
        // u^-2 + (1/5)u^2 trusted on [-2, 2], times the exact monomial u^-1
        let a = LaurentSeries::truncated(-2, vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 5)], 2);
        let p = &a * &LaurentSeries::monomial(rat(1, 1), -1);
        assert_eq!(p.window(), (-3, Some(1)));
        assert_eq!(p.coeff(-3).unwrap(), rat(1, 1));
        assert_eq!(p.coeff(1).unwrap(), rat(1, 5));
        assert_eq!(p.coeff(0).unwrap(), rat(0, 1));
        assert!(p.coeff(2).is_err());
    }

    #[test]
    fn truncated_times_truncated_loses_precision() {
        // [a,b] x [c,d] -> [a+c, min(a+d, b+c)]
        let a = s(-2, &[1], 2);
        let b = s(-1, &[1], -1);
        assert_eq!((&a * &b).window(), (-3, Some(-3)));
    }

    #[test]
    fn derivatives() {
        let inv = LaurentSeries::monomial(rat(1, 1), -1);
        assert_eq!(inv.derivative(), LaurentSeries::monomial(rat(-1, 1), -2));
        assert!(LaurentSeries::constant(rat(7, 3)).derivative().is_zero());
        let p = LaurentSeries::from_terms([(-2, rat(1, 1)), (1, rat(3, 1))]);
        assert_eq!(p.derivative(), LaurentSeries::from_terms([(-3, rat(-2, 1)), (0, rat(3, 1))]));
        assert_eq!(s(0, &[1, 1], 5).derivative().window(), (0, Some(4)));
    }

    #[test]
    fn read_above_window_is_error() {
        let a = s(0, &[1, 2, 3], 4);
        assert_eq!(a.coeff(4).unwrap(), rat(0, 1));
        assert!(matches!(a.coeff(5), Err(Error::UntrustedWindow { .. })));
        assert_eq!(a.coeff(-10).unwrap(), rat(0, 1));
    }

    #[test]
    fn empty_window_product() {
        let a = s(0, &[1], 0);
        let b = LaurentSeries::monomial(rat(1, 1), -3);
        let p = &a * &b;
        assert!(p.coeff(-3).is_ok());
        assert!(p.coeff(-2).is_err());
        let q = &s(0, &[], -1) * &s(0, &[1], 2);
        assert!(q.is_zero());
        assert!(q.coeff(0).is_err());
    }

    #[test]
    fn inverse_of_unit() {
        let d = LaurentSeries::from_terms([(0, rat(-2, 1)), (2, rat(1, 1))]);
        let inv = d.inverse(10).unwrap();
        let prod = &d * &inv;
        assert_eq!(prod.precision(), Some(10));
        assert!(prod.agrees_with(&LaurentSeries::one()));
        let m = LaurentSeries::monomial(rat(3, 1), 2);
        assert_eq!(m.inverse(5).unwrap(), LaurentSeries::monomial(rat(1, 3), -2));
    }

    #[test]
    fn display() {
        let p = LaurentSeries::from_terms([(-2, rat(1, 1)), (0, rat(-3, 2)), (1, rat(1, 1))]);
        assert_eq!(p.to_string(), "u1^-2 - 3/2 + u1");
        assert_eq!(s(0, &[1], 3).to_string(), "1 + O(u1^4)");
    }
}
