use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::{LaurentSeries, Rat};
use crate::error::{Error, Result};

/// Finite sum `sum_m E^m * L_m(u1)` where `E` stands for `exp(t0/u1)`.
///
/// `E` is treated as a formal unit with `dE/du1 = -(t0/u1^2) E`; the twist
/// parameter `t0` is supplied by the caller at differentiation time.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TwistedLaurent {
    parts: BTreeMap<i32, LaurentSeries>,
}

impl TwistedLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::plain(LaurentSeries::one())
    }

    /// E-degree zero element.
    pub fn plain(series: LaurentSeries) -> Self {
        Self::with_degree(0, series)
    }

    pub fn with_degree(e_degree: i32, series: LaurentSeries) -> Self {
        let mut parts = BTreeMap::new();
        parts.insert(e_degree, series);
        let mut out = TwistedLaurent { parts };
        out.prune();
        out
    }

    pub fn constant(c: Rat) -> Self {
        Self::plain(LaurentSeries::constant(c))
    }

    pub fn monomial(c: Rat, exponent: i64) -> Self {
        Self::plain(LaurentSeries::monomial(c, exponent))
    }

    fn prune(&mut self) {
        // exact zeros carry no information; truncated zeros still carry a
        // precision bound and are kept
        self.parts.retain(|_, s| !(s.is_zero() && s.is_exact()));
    }

    pub fn parts(&self) -> impl Iterator<Item = (i32, &LaurentSeries)> + '_ {
        self.parts.iter().map(|(m, s)| (*m, s))
    }

    pub fn part(&self, e_degree: i32) -> LaurentSeries {
        self.parts.get(&e_degree).cloned().unwrap_or_else(LaurentSeries::zero)
    }

    /// True when all trusted coefficients of all parts vanish.
    pub fn is_zero(&self) -> bool {
        self.parts.values().all(LaurentSeries::is_zero)
    }

    /// Only E-degree 0 carries nonzero coefficients.
    pub fn is_untwisted(&self) -> bool {
        self.parts.iter().all(|(m, s)| *m == 0 || s.is_zero())
    }

    /// The E-degree-0 part, failing if any other degree is nonzero.
    pub fn untwisted(&self) -> Result<LaurentSeries> {
        if !self.is_untwisted() {
            return Err(Error::IllFormedSection(format!(
                "expected E-degree 0 only, found degrees {:?}",
                self.parts.iter().filter(|(_, s)| !s.is_zero()).map(|(m, _)| *m).collect::<Vec<_>>()
            )));
        }
        Ok(self.part(0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut parts = self.parts.clone();
        for (m, s) in &other.parts {
            let entry = parts.entry(*m).or_insert_with(LaurentSeries::zero);
            *entry = &*entry + s;
        }
        let mut out = TwistedLaurent { parts };
        out.prune();
        out
    }

    pub fn neg(&self) -> Self {
        TwistedLaurent { parts: self.parts.iter().map(|(m, s)| (*m, -s)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = TwistedLaurent { parts: self.parts.iter().map(|(m, s)| (*m, s.scale(c))).collect() };
        out.prune();
        out
    }

    pub fn mul_series(&self, s: &LaurentSeries) -> Self {
        let mut out = TwistedLaurent { parts: self.parts.iter().map(|(m, p)| (*m, p * s)).collect() };
        out.prune();
        out
    }

    pub fn shift(&self, shift: i64) -> Self {
        TwistedLaurent { parts: self.parts.iter().map(|(m, s)| (*m, s.shift(shift))).collect() }
    }

    /// Products add E-degrees.
    pub fn mul(&self, other: &Self) -> Self {
        let mut parts: BTreeMap<i32, LaurentSeries> = BTreeMap::new();
        for (m, a) in &self.parts {
            for (k, b) in &other.parts {
                let prod = a * b;
                let entry = parts.entry(m + k).or_insert_with(LaurentSeries::zero);
                *entry = &*entry + &prod;
            }
        }
        let mut out = TwistedLaurent { parts };
        out.prune();
        out
    }

    /// `d/du1` with `d(E^m L)/du1 = E^m (L' - m t0 u1^-2 L)`.
    pub fn derivative(&self, t0: &Rat) -> Self {
        let mut parts = BTreeMap::new();
        for (m, s) in &self.parts {
            let mut d = s.derivative();
            if *m != 0 && !t0.is_zero() {
                let factor = LaurentSeries::monomial(-t0 * Rat::from_integer((*m).into()), -2);
                d = &d + &(&factor * s);
            }
            parts.insert(*m, d);
        }
        let mut out = TwistedLaurent { parts };
        out.prune();
        out
    }

    /// Inverse of an element concentrated in a single E-degree.
    pub fn inverse(&self, want_hi: i64) -> Result<Self> {
        let nonzero: Vec<_> = self.parts.iter().filter(|(_, s)| !s.is_zero()).collect();
        match nonzero.as_slice() {
            [(m, s)] => Ok(TwistedLaurent::with_degree(-**m, s.inverse(want_hi)?)),
            [] => Err(Error::SingularTransition("inverse of zero".into())),
            _ => Err(Error::SingularTransition("inverse of an element with several E-degrees".into())),
        }
    }

    /// Lowest precision bound among the parts (`None` if all exact).
    pub fn precision(&self) -> Option<i64> {
        self.parts.values().filter_map(LaurentSeries::precision).min()
    }

    pub fn truncate(&self, hi: i64) -> Self {
        let mut out = TwistedLaurent { parts: self.parts.iter().map(|(m, s)| (*m, s.truncate(hi))).collect() };
        out.prune();
        out
    }
}

impl From<LaurentSeries> for TwistedLaurent {
    fn from(s: LaurentSeries) -> Self {
        TwistedLaurent::plain(s)
    }
}

impl fmt::Display for TwistedLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<_> = self.parts.iter().filter(|(_, s)| !s.is_zero()).collect();
        if shown.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, s)) in shown.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if **m == 0 {
                write!(f, "{}", s)?;
            } else {
                write!(f, "E^{}*({})", m, s)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn derivative_of_e() {
        let e = TwistedLaurent::with_degree(1, LaurentSeries::one());
        let d = e.derivative(&rat(1, 1));
        assert_eq!(d, TwistedLaurent::with_degree(1, LaurentSeries::monomial(rat(-1, 1), -2)));
    }

    #[test]
    fn degree_zero_matches_plain_derivative() {
        let s = LaurentSeries::from_terms([(-3, rat(2, 1)), (4, rat(1, 7))]);
        let t = TwistedLaurent::plain(s.clone());
        assert_eq!(t.derivative(&rat(5, 3)), TwistedLaurent::plain(s.derivative()));
    }

    #[test]
    fn negative_degree_product_rule() {
        let t = TwistedLaurent::with_degree(-1, LaurentSeries::monomial(rat(1, 1), 1));
        let d = t.derivative(&rat(2, 1));
        let want = LaurentSeries::from_terms([(0, rat(1, 1)), (-1, rat(2, 1))]);
        assert_eq!(d, TwistedLaurent::with_degree(-1, want));
    }

    #[test]
    fn e_degrees_cancel_in_products() {
        let e = TwistedLaurent::with_degree(1, LaurentSeries::monomial(rat(3, 1), 0));
        let einv = e.inverse(10).unwrap();
        assert_eq!(e.mul(&einv), TwistedLaurent::one());
        assert!(e.mul(&einv).is_untwisted());
    }
}
