//! Canonical, lossless text forms for exact values.
//!
//! Every formatter here has a parser that reproduces the value bit for
//! bit, and formatting is deterministic (term order fixed by the graded
//! ordering). These forms are what the command-line layer embeds in its
//! reports, so byte-identical reruns reduce to the determinism of the
//! computations themselves.
//!
//! Grammar:
//! * rational: `num/den` with `den > 0`, e.g. `-3/2`, `5/1`
//! * polynomial: grlex-descending terms `e1,e2,...:coeff` joined by `; `,
//!   exponents padded to the polynomial's support arity; `0` when zero
//! * fraction: `numerator | denominator`

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{Monomial, MultiPoly, PolyFraction};
use crate::{Error, Result};

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `num/den` (or a bare integer, read as `n/1`).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num)
        .map_err(|_| Error::Parse(format!("bad rational numerator {num:?}")))?;
    let den = BigInt::from_str(den)
        .map_err(|_| Error::Parse(format!("bad rational denominator {den:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse("rational with zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

pub fn format_multipoly(p: &MultiPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let arity = p.support_arity();
    let mut parts = Vec::with_capacity(p.term_count());
    // Term iteration is grlex-ascending; emit largest term first.
    let entries: Vec<_> = p.terms().collect();
    for (m, c) in entries.into_iter().rev() {
        let exps: Vec<String> = m.padded(arity).iter().map(|e| e.to_string()).collect();
        parts.push(format!("{}:{}", exps.join(","), c));
    }
    parts.join("; ")
}

pub fn parse_multipoly(s: &str) -> Result<MultiPoly> {
    let s = s.trim();
    if s == "0" {
        return Ok(MultiPoly::zero());
    }
    let mut p = MultiPoly::zero();
    for part in s.split(';') {
        let part = part.trim();
        let (exps, coeff) = part
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("polynomial term {part:?} lacks ':'")))?;
        let exps: Vec<u32> = exps
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad exponent {t:?}")))
            })
            .collect::<Result<_>>()?;
        let coeff = BigInt::from_str(coeff.trim())
            .map_err(|_| Error::Parse(format!("bad coefficient {coeff:?}")))?;
        p.add_term(Monomial::new(exps), coeff);
    }
    Ok(p)
}

pub fn format_polyfrac(f: &PolyFraction) -> String {
    format!(
        "{} | {}",
        format_multipoly(f.numerator()),
        format_multipoly(f.denominator())
    )
}

pub fn parse_polyfrac(s: &str) -> Result<PolyFraction> {
    let (num, den) = s
        .split_once('|')
        .ok_or_else(|| Error::Parse("fraction lacks '|' separator".into()))?;
    PolyFraction::new(parse_multipoly(num)?, parse_multipoly(den)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_text_is_always_num_slash_den() {
        let r = BigRational::new(BigInt::from(6), BigInt::from(-4));
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), r);
        assert_eq!(parse_rational("7").unwrap(), BigRational::from(BigInt::from(7)));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn polynomial_terms_come_out_grlex_descending() {
        // x_1^2 + x_{-1} x_2 + 3 over slots (x_1, x_{-1}, x_2).
        let mut p = MultiPoly::zero();
        p.add_term(Monomial::new(vec![2]), BigInt::from(1));
        p.add_term(Monomial::new(vec![0, 1, 1]), BigInt::from(1));
        p.add_term(Monomial::one(), BigInt::from(3));
        assert_eq!(format_multipoly(&p), "2,0,0:1; 0,1,1:1; 0,0,0:3");
        assert_eq!(parse_multipoly(&format_multipoly(&p)).unwrap(), p);
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        proptest::collection::vec(
            (proptest::collection::vec(0u32..4, 0..4), -20i64..20),
            0..5,
        )
        .prop_map(|terms| {
            let mut p = MultiPoly::zero();
            for (exps, c) in terms {
                p.add_term(Monomial::new(exps), BigInt::from(c));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn rational_round_trip(n in -10_000i64..10_000, d in 1u32..10_000) {
            let r = BigRational::new(BigInt::from(n), BigInt::from(d));
            prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }

        #[test]
        fn polynomial_round_trip(p in arb_poly()) {
            prop_assert_eq!(parse_multipoly(&format_multipoly(&p)).unwrap(), p);
        }

        #[test]
        fn fraction_round_trip(n in arb_poly(), d in arb_poly()) {
            prop_assume!(!d.is_zero());
            let f = PolyFraction::new(n, d).unwrap();
            prop_assert_eq!(parse_polyfrac(&format_polyfrac(&f)).unwrap(), f);
        }
    }
}
