//! Exact scalars, truncated Laurent series, and rational linear algebra.
//!
//! Nothing in the engine ever rounds: every coefficient is a [`Rat`].

mod matrix;
mod series;
mod sparse;
mod twisted;

pub use matrix::RatMatrix;
pub use series::LaurentSeries;
pub(crate) use series::fmt_rat_term;
pub use sparse::{axpy, EchelonBasis, SparseVec};
pub use twisted::TwistedLaurent;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p`, or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {:?}", s));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(Error::Parse(format!("zero denominator in {:?}", s)));
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rat("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rat(" -4 ").unwrap(), int(-4));
        assert_eq!(parse_rat("2/-4").unwrap(), rat(-1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = rat(6, -8);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(4));
    }
}
