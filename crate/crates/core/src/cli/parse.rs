//! Field expressions and coefficient lists.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := rational? factor* gen
//! factor := 'u1^'int | 'xi^'int | 'wp^('int')' | 'E^'int
//! gen    := 'd_xi' | 'd_u' | 'd_xi^d_u'
//! ```
//!
//! Whitespace is ignored, `*` between items is allowed, and bare `u1`,
//! `xi`, `wp`, `E` mean exponent one (`wp` is `wp^(0)`).

use num_traits::{One, Zero};

use crate::atlas::SurfaceFamily;
use crate::cech::{Section, Sheaf};
use crate::elliptic::{EllipticFunction, EllipticParams};
use crate::error::{Error, Result};
use crate::exactalg::{parse_rat, LaurentSeries, Rat, TwistedLaurent};
use crate::poissonco::{param_names, PoissonStructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    DU,
    DXi,
    DXiDU,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rat,
    pub u1: i64,
    pub xi: usize,
    pub wp: Vec<usize>,
    pub e_degree: i32,
    pub gen: Generator,
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> Error {
        let rest = String::from_utf8_lossy(&self.s[self.pos..]);
        Error::Parse(format!("{} at offset {} (near {:?})", what, self.pos, rest))
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.s[start..self.pos]).expect("ascii"))
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat("-");
        if !neg {
            self.eat("+");
        }
        let d = self.digits().ok_or_else(|| self.err("expected an integer"))?;
        let v: i64 = d.parse().map_err(|_| self.err("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn exponent(&mut self) -> Result<i64> {
        if self.eat("^") {
            self.int()
        } else {
            Ok(1)
        }
    }

    fn rational(&mut self) -> Result<Option<Rat>> {
        let Some(p) = self.digits() else { return Ok(None) };
        let p = p.to_string();
        if self.eat("/") {
            let q = self.digits().ok_or_else(|| self.err("expected a denominator"))?;
            return parse_rat(&format!("{}/{}", p, q)).map(Some);
        }
        parse_rat(&p).map(Some)
    }

    fn term(&mut self, sign: Rat) -> Result<Term> {
        let mut t = Term { coeff: sign, u1: 0, xi: 0, wp: Vec::new(), e_degree: 0, gen: Generator::DU };
        if let Some(c) = self.rational()? {
            t.coeff *= c;
        }
        loop {
            self.eat("*");
            if self.eat("d_xi^d_u") {
                t.gen = Generator::DXiDU;
                return Ok(t);
            } else if self.eat("d_xi") {
                t.gen = Generator::DXi;
                return Ok(t);
            } else if self.eat("d_u") {
                t.gen = Generator::DU;
                return Ok(t);
            } else if self.eat("u1") {
                t.u1 += self.exponent()?;
            } else if self.eat("xi") {
                let e = self.exponent()?;
                if e < 0 {
                    return Err(self.err("negative power of xi"));
                }
                t.xi += e as usize;
            } else if self.eat("wp") {
                let k = if self.eat("^(") {
                    let k = self.int()?;
                    if k < 0 || !self.eat(")") {
                        return Err(self.err("expected wp^(k) with k >= 0"));
                    }
                    k as usize
                } else {
                    0
                };
                t.wp.push(k);
            } else if self.eat("E") {
                let m = self.exponent()?;
                t.e_degree += i32::try_from(m).map_err(|_| self.err("E exponent out of range"))?;
            } else {
                return Err(self.err("expected a factor or d_xi, d_u, d_xi^d_u"));
            }
        }
    }
}

pub fn parse_terms(input: &str) -> Result<Vec<Term>> {
    let clean: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if clean.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut lx = Lexer { s: clean.as_bytes(), pos: 0 };
    let mut terms = Vec::new();
    let mut first = true;
    while lx.peek().is_some() {
        let sign = if lx.eat("+") {
            Rat::one()
        } else if lx.eat("-") {
            -Rat::one()
        } else if first {
            Rat::one()
        } else {
            return Err(lx.err("expected '+' or '-'"));
        };
        terms.push(lx.term(sign)?);
        first = false;
    }
    Ok(terms)
}

/// Builds the section in one chart, expanding `wp` factors through `order`.
pub fn terms_to_section(terms: &[Term], params: &EllipticParams, order: i64) -> Result<Section> {
    let sheaf = match terms[0].gen {
        Generator::DXiDU => Sheaf::Wedge2Theta,
        _ => Sheaf::Theta,
    };
    let mut comps = vec![TwistedLaurent::zero(); sheaf.components()];
    for t in terms {
        let comp = match (sheaf, t.gen, t.xi) {
            (Sheaf::Theta, Generator::DU, 0) => 0,
            (Sheaf::Theta, Generator::DU, _) => return Err(Error::IllFormedSection("the d_u coefficient cannot depend on xi".into())),
            (Sheaf::Theta, Generator::DXi, j) if j <= 2 => 1 + j,
            (Sheaf::Wedge2Theta, Generator::DXiDU, j) if j <= 2 => j,
            (_, Generator::DXiDU, _) | (Sheaf::Wedge2Theta, _, _) => {
                return Err(Error::IllFormedSection("an expression mixes vector and bivector terms".into()))
            }
            _ => return Err(Error::IllFormedSection("xi-degree above 2".into())),
        };
        let mut s = LaurentSeries::monomial(t.coeff.clone(), t.u1);
        for &k in &t.wp {
            let w = EllipticFunction::wp(k, Rat::one()).to_series(params, order - t.u1)?;
            s = &s * &w;
        }
        let c = TwistedLaurent::with_degree(t.e_degree, s);
        comps[comp] = comps[comp].add(&c);
    }
    Ok(Section::from_components(sheaf, comps))
}

pub fn parse_section(input: &str, params: &EllipticParams, order: i64) -> Result<Section> {
    terms_to_section(&parse_terms(input)?, params, order)
}

/// `A=1,B=2/3,C=0` by name, or `1,2/3,0` in the family's order.
pub fn parse_coeffs(family: &SurfaceFamily, input: &str) -> Result<PoissonStructure> {
    let names = param_names(family);
    let items: Vec<&str> = input.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let arity = || {
        Error::Arity(format!(
            "{} takes coefficients ({}), got {:?}",
            family,
            if names.is_empty() { "none".to_string() } else { names.join(", ") },
            input
        ))
    };
    if items.len() != names.len() {
        return Err(arity());
    }
    let named = items.iter().any(|s| s.contains('='));
    let mut coeffs = vec![None; names.len()];
    for (i, item) in items.iter().enumerate() {
        let (slot, value) = if named {
            let (k, v) = item.split_once('=').ok_or_else(arity)?;
            (names.iter().position(|n| n == k.trim()).ok_or_else(arity)?, v)
        } else {
            (i, *item)
        };
        if coeffs[slot].is_some() {
            return Err(arity());
        }
        coeffs[slot] = Some(parse_rat(value)?);
    }
    let coeffs = coeffs.into_iter().map(|c| c.unwrap_or_else(Rat::zero)).collect();
    PoissonStructure::new(family.clone(), coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};

    #[test]
    fn parses_the_grammar() {
        let t = parse_terms("2 d_u - 1/2 u1^-1 xi^2 d_xi + E^1 xi d_xi^d_u - wp^(1) d_xi").unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t[0].coeff, int(2));
        assert_eq!(t[1].coeff, rat(-1, 2));
        assert_eq!((t[1].u1, t[1].xi, t[1].gen), (-1, 2, Generator::DXi));
        assert_eq!((t[2].e_degree, t[2].xi, t[2].gen), (1, 1, Generator::DXiDU));
        assert_eq!(t[3].wp, vec![1]);
    }

    #[test]
    fn display_round_trips() {
        let p = EllipticParams::default();
        for src in ["2*d_u - 1/2*u1^-1*d_xi + xi^2*d_xi", "E^1*xi*d_xi^d_u", "-u1^-3*d_xi^d_u + 3*xi^2*d_xi^d_u"] {
            let s = parse_section(src, &p, 10).unwrap();
            let back = parse_section(&s.to_string(), &p, 10).unwrap();
            assert_eq!(s, back, "{}", src);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let p = EllipticParams::default();
        assert!(matches!(parse_terms("2 xi"), Err(Error::Parse(_))));
        assert!(matches!(parse_terms("d_u d_xi"), Err(Error::Parse(_))));
        assert!(matches!(parse_section("xi d_u", &p, 6), Err(Error::IllFormedSection(_))));
        assert!(matches!(parse_section("d_u + d_xi^d_u", &p, 6), Err(Error::IllFormedSection(_))));
        assert!(matches!(parse_section("xi^3 d_xi", &p, 6), Err(Error::IllFormedSection(_))));
    }

    #[test]
    fn coefficient_lists() {
        let e = EllipticParams::default();
        let sn = SurfaceFamily::sn(2, e.clone()).unwrap();
        let p = parse_coeffs(&sn, "c1=1/2, a0=0, c0=3").unwrap();
        assert_eq!(p.coeffs(), &[int(0), int(3), rat(1, 2)]);
        assert!(matches!(parse_coeffs(&sn, "a0=1"), Err(Error::Arity(_))));
        assert!(matches!(parse_coeffs(&sn, "a0=1,c0=2,x=3"), Err(Error::Arity(_))));
        let am1 = SurfaceFamily::aminus1(e);
        assert!(parse_coeffs(&am1, "").unwrap().is_zero());
    }
}
