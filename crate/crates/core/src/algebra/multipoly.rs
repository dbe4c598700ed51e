//! Sparse multivariate polynomials over the integers.
//!
//! Variables form one global indexed family. For the fixed-point coordinates
//! `x_1, x_{-1}, ..., x_g, x_{-g}` of a rank-g group the convention,
//! used everywhere in this crate, is interleaved slots:
//!
//! ```text
//! slot(+k) = 2(k-1),  slot(-k) = 2(k-1) + 1      (k = 1..g)
//! ```
//!
//! so the variable order `x_1 < x_{-1} < x_2 < x_{-2} < ...` matches the
//! letter order of reduced words. Monomials are compared graded
//! lexicographically: first by total degree, then by the exponent sequence
//! in slot order. Polynomials never store zero coefficients, and exponent
//! vectors are kept with trailing zeros trimmed so a polynomial does not
//! carry a variable count; serialization pads to the ambient arity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Slot of the signed fixed-point index `i` (`i != 0`) in the global
/// variable family.
pub fn slot(index: i32) -> usize {
    debug_assert!(index != 0);
    2 * (index.unsigned_abs() as usize - 1) + usize::from(index < 0)
}

/// An exponent vector with trailing zeros trimmed, ordered grlex.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn variable(slot: usize) -> Self {
        let mut exps = vec![0; slot + 1];
        exps[slot] = 1;
        Monomial(exps)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponent(&self, slot: usize) -> u32 {
        self.0.get(slot).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Exponents padded with zeros to length `len` (`len` must cover the
    /// support).
    pub fn padded(&self, len: usize) -> Vec<u32> {
        assert!(self.0.len() <= len, "monomial support exceeds arity");
        let mut exps = self.0.clone();
        exps.resize(len, 0);
        exps
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        let exps = (0..len)
            .map(|k| self.exponent(k) + other.exponent(k))
            .collect();
        Monomial::new(exps)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let len = self.0.len().max(other.0.len());
        for k in 0..len {
            match self.exponent(k).cmp(&other.exponent(k)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A multivariate polynomial with integer coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        MultiPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        MultiPoly { terms }
    }

    pub fn variable(slot: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::variable(slot), BigInt::one());
        MultiPoly { terms }
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut poly = MultiPoly::zero();
        for (m, c) in pairs {
            poly.add_term(m, c);
        }
        poly
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest slot index with a nonzero exponent anywhere, plus one.
    pub fn support_arity(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.exponents().len())
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of the grlex-largest monomial; zero for the zero
    /// polynomial.
    pub fn leading_coefficient(&self) -> BigInt {
        self.terms
            .iter()
            .next_back()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigInt::zero)
    }

    /// GCD of all coefficients, non-negative; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.terms.values() {
            acc = acc.gcd(c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    /// Divides every coefficient by `d` (must divide exactly).
    pub fn div_exact(&self, d: &BigInt) -> MultiPoly {
        assert!(!d.is_zero(), "division of polynomial by zero");
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let (q, r) = c.div_rem(d);
                assert!(r.is_zero(), "inexact content division");
                (m.clone(), q)
            })
            .collect();
        MultiPoly { terms }
    }

    pub fn neg(&self) -> MultiPoly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        MultiPoly { terms }
    }

    pub fn add(&self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &MultiPoly) -> MultiPoly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut exp = e;
        let mut acc = MultiPoly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Evaluates at rational values, indexed by slot. `values` must cover
    /// the support.
    pub fn eval(&self, values: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = BigRational::from(c.clone());
            for (k, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    assert!(k < values.len(), "evaluation point misses slot {k}");
                    term *= pow_rational(&values[k], e);
                }
            }
            acc += term;
        }
        acc
    }

    /// The hyperelliptic substitution `x_{-k} -> -x_k` for `k = 1..g`:
    /// every exponent on an odd slot moves to the even slot of the same
    /// pair, negating the coefficient once per transferred power.
    pub fn mirror_negate(&self, g: usize) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut exps = m.padded(m.exponents().len().max(2 * g));
            let mut sign_flips = 0u32;
            for k in 0..g {
                let minus_slot = 2 * k + 1;
                if minus_slot < exps.len() && exps[minus_slot] > 0 {
                    sign_flips += exps[minus_slot];
                    exps[2 * k] += exps[minus_slot];
                    exps[minus_slot] = 0;
                }
            }
            let coeff = if sign_flips % 2 == 0 {
                c.clone()
            } else {
                -c.clone()
            };
            out.add_term(Monomial::new(exps), coeff);
        }
        out
    }
}

fn pow_rational(v: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = v.clone();
    let mut exp = e;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= &base;
        }
        exp >>= 1;
        if exp > 0 {
            base = base.clone() * &base;
        }
    }
    acc
}

pub(crate) fn is_sign_negative(c: &BigInt) -> bool {
    c.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: i32) -> MultiPoly {
        MultiPoly::variable(slot(i))
    }

    #[test]
    fn slot_convention_interleaves_signs() {
        assert_eq!(slot(1), 0);
        assert_eq!(slot(-1), 1);
        assert_eq!(slot(3), 4);
        assert_eq!(slot(-3), 5);
    }

    #[test]
    fn grlex_orders_by_degree_then_slots() {
        let m1 = Monomial::new(vec![2, 0]);
        let m2 = Monomial::new(vec![1, 1]);
        let m3 = Monomial::new(vec![0, 1]);
        assert!(m1 > m2, "same degree, earlier slot wins");
        assert!(m2 > m3, "higher degree wins");
        assert_eq!(Monomial::new(vec![1, 0, 0]), Monomial::new(vec![1]));
    }

    #[test]
    fn ring_ops_and_cancellation() {
        let p = x(1).add(&x(-1));
        let q = x(1).sub(&x(-1));
        // (x1 + x_{-1})(x1 - x_{-1}) = x1^2 - x_{-1}^2
        let prod = p.mul(&q);
        let expect = x(1).pow(2).sub(&x(-1).pow(2));
        assert_eq!(prod, expect);
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn evaluation_matches_hand_value() {
        // p = 3 x1^2 x_{-1} - 7 at x1 = 1/2, x_{-1} = -4: 3*(1/4)*(-4) - 7 = -10
        let p = MultiPoly::constant(BigInt::from(3))
            .mul(&x(1).pow(2))
            .mul(&x(-1))
            .sub(&MultiPoly::constant(BigInt::from(7)));
        let vals = vec![
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            BigRational::from(BigInt::from(-4)),
        ];
        assert_eq!(p.eval(&vals), BigRational::from(BigInt::from(-10)));
    }

    #[test]
    fn mirror_negate_moves_odd_slots() {
        // x_{-1}^2 x_{-2} -> (x_1)^2 (-x_2) = -x_1^2 x_2
        let p = x(-1).pow(2).mul(&x(-2));
        let q = p.mirror_negate(2);
        assert_eq!(q, x(1).pow(2).mul(&x(2)).neg());
        // substitution is a ring map: (a*b)' = a'*b'
        let a = x(1).add(&x(-2));
        let b = x(-1).sub(&x(2));
        assert_eq!(
            a.mul(&b).mirror_negate(2),
            a.mirror_negate(2).mul(&b.mirror_negate(2))
        );
    }

    #[test]
    fn content_and_leading_sign() {
        let p = MultiPoly::constant(BigInt::from(-6))
            .mul(&x(1))
            .add(&MultiPoly::constant(BigInt::from(9)).mul(&x(2)));
        assert_eq!(p.content(), BigInt::from(3));
        // grlex leading monomial of -6 x1 + 9 x2 is the x2 term (later slot
        // is larger in lex? no: earlier slot larger) -> leading is -6 x1.
        assert_eq!(p.leading_coefficient(), BigInt::from(-6));
    }
}
