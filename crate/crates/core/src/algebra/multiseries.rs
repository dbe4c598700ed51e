//! Multivariate power series truncated by total degree.
//!
//! `MultiSeries<C>` models an element of `R[[y_1..y_n]] / I^(D+1)` where `I`
//! is the ideal generated by the variables and `R` is any [`Scalar`] ring:
//! `C = PolyFraction` is the symbolic mode over the cross-ratio ring,
//! `C = BigRational` the evaluated mode, and `C = RatFunc` carries the
//! q-expansions with an extra parameter. Addition and multiplication
//! truncate to the smaller of the operands' degrees; inversion requires an
//! invertible constant term and is exact modulo `I^(D+1)` because the
//! maximal-ideal part is nilpotent there.
//!
//! A series carries `unit`, the coefficient ring's one, as context so that
//! constants can be manufactured where only the series is at hand (the
//! coefficient ring may itself be context-bearing).

use super::multipoly::Monomial;
use super::scalar::Scalar;
use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct MultiSeries<C: Scalar> {
    num_vars: usize,
    max_degree: u32,
    unit: C,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Scalar> MultiSeries<C> {
    pub fn zero(num_vars: usize, max_degree: u32, unit: C) -> Self {
        MultiSeries {
            num_vars,
            max_degree,
            unit,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, max_degree: u32, value: C) -> Self {
        let unit = value.one_like();
        let mut s = MultiSeries::zero(num_vars, max_degree, unit);
        s.add_term(Monomial::one(), value);
        s
    }

    pub fn one(num_vars: usize, max_degree: u32, unit: C) -> Self {
        let mut s = MultiSeries::zero(num_vars, max_degree, unit.clone());
        s.add_term(Monomial::one(), unit);
        s
    }

    /// The series `y_{k+1}` (variable of slot `k`, zero-based).
    pub fn variable(num_vars: usize, max_degree: u32, k: usize, unit: C) -> Self {
        assert!(k < num_vars, "variable slot out of range");
        assert!(max_degree >= 1, "degree-0 truncation cannot hold a variable");
        let mut s = MultiSeries::zero(num_vars, max_degree, unit.clone());
        s.add_term(Monomial::variable(k), unit);
        s
    }

    pub fn from_terms(
        num_vars: usize,
        max_degree: u32,
        unit: C,
        pairs: impl IntoIterator<Item = (Monomial, C)>,
    ) -> Self {
        let mut s = MultiSeries::zero(num_vars, max_degree, unit);
        for (m, c) in pairs {
            s.add_term(m, c);
        }
        s
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        assert!(
            m.exponents().len() <= self.num_vars,
            "monomial mentions variable beyond arity"
        );
        if c.is_zero() || m.degree() > self.max_degree {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn unit(&self) -> &C {
        &self.unit
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn constant_term(&self) -> Option<&C> {
        self.terms.get(&Monomial::one())
    }

    /// Smallest total degree carrying a nonzero term; `None` for zero.
    pub fn min_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn truncate(&self, max_degree: u32) -> Self {
        let mut out = MultiSeries::zero(self.num_vars, max_degree, self.unit.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn check_arity(&self, rhs: &Self) {
        assert_eq!(
            self.num_vars, rhs.num_vars,
            "series arity mismatch: {} vs {}",
            self.num_vars, rhs.num_vars
        );
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_arity(rhs);
        let d = self.max_degree.min(rhs.max_degree);
        let mut out = self.truncate(d);
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_arity(rhs);
        let d = self.max_degree.min(rhs.max_degree);
        let mut out = MultiSeries::zero(self.num_vars, d, self.unit.clone());
        for (ma, ca) in &self.terms {
            if ma.degree() > d {
                continue;
            }
            for (mb, cb) in &rhs.terms {
                if ma.degree() + mb.degree() > d {
                    continue;
                }
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &C) -> Self {
        let mut out = MultiSeries::zero(self.num_vars, self.max_degree, self.unit.clone());
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.mul(c));
        }
        out
    }

    /// Inverse modulo `I^(max_degree+1)`. The constant term must be a unit
    /// of the coefficient ring; this is a clean error, never a panic.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self
            .constant_term()
            .ok_or_else(|| Error::NotInvertible("series with zero constant term".into()))?;
        let c0_inv = c0.try_inv().ok_or_else(|| {
            Error::NotInvertible("series constant term is not a unit".into())
        })?;
        // a = c0 (1 + u) with u in I, so 1/a = c0^{-1} sum (-u)^k, k <= D.
        let scaled = self.scale(&c0_inv);
        let one = MultiSeries::one(self.num_vars, self.max_degree, self.unit.clone());
        let minus_u = one.sub(&scaled);
        let mut acc = one.clone();
        let mut pow = one;
        for _ in 1..=self.max_degree {
            pow = pow.mul(&minus_u);
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Integer power; negative exponents go through [`Self::inverse`].
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut acc = MultiSeries::one(self.num_vars, self.max_degree, self.unit.clone());
        let mut base = self.clone();
        let mut exp = e;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Substitutes values for the variables. `values[k]` replaces `y_{k+1}`;
    /// exact in the coefficient ring.
    pub fn evaluate(&self, values: &[C]) -> C {
        assert_eq!(values.len(), self.num_vars, "evaluation arity mismatch");
        let mut acc = self.unit.zero_like();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (k, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&values[k]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Rebuilds the series over another coefficient ring, term by term.
    /// Typical use: evaluating symbolic coefficients at a rational point.
    pub fn map_coeffs<D: Scalar>(
        &self,
        unit: D,
        mut f: impl FnMut(&C) -> Result<D>,
    ) -> Result<MultiSeries<D>> {
        let mut out = MultiSeries::zero(self.num_vars, self.max_degree, unit);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }
}

/// Equality compares arity, truncation degree and the (zero-free) term maps.
impl<C: Scalar> PartialEq for MultiSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars
            && self.max_degree == other.max_degree
            && self.terms == other.terms
    }
}

impl<C: Scalar> Scalar for MultiSeries<C> {
    fn zero_like(&self) -> Self {
        MultiSeries::zero(self.num_vars, self.max_degree, self.unit.clone())
    }
    fn one_like(&self) -> Self {
        MultiSeries::one(self.num_vars, self.max_degree, self.unit.clone())
    }
    fn is_zero(&self) -> bool {
        MultiSeries::is_zero(self)
    }
    fn neg(&self) -> Self {
        MultiSeries::neg(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        MultiSeries::add(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        MultiSeries::mul(self, rhs)
    }
    fn try_inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::One;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn y(k: usize, nv: usize, d: u32) -> MultiSeries<BigRational> {
        MultiSeries::variable(nv, d, k, BigRational::one())
    }

    fn one(nv: usize, d: u32) -> MultiSeries<BigRational> {
        MultiSeries::one(nv, d, BigRational::one())
    }

    #[test]
    fn square_of_one_plus_y1_plus_y2() {
        // (1 + y1 + y2)^2 = 1 + 2y1 + 2y2 + y1^2 + 2 y1 y2 + y2^2
        let s = one(2, 2).add(&y(0, 2, 2)).add(&y(1, 2, 2));
        let sq = s.mul(&s);
        let coeff = |exps: &[u32]| {
            sq.coefficient(&Monomial::new(exps.to_vec()))
                .cloned()
                .unwrap_or_else(|| rat(0, 1))
        };
        assert_eq!(coeff(&[]), rat(1, 1));
        assert_eq!(coeff(&[1, 0]), rat(2, 1));
        assert_eq!(coeff(&[0, 1]), rat(2, 1));
        assert_eq!(coeff(&[2, 0]), rat(1, 1));
        assert_eq!(coeff(&[1, 1]), rat(2, 1));
        assert_eq!(coeff(&[0, 2]), rat(1, 1));
        assert_eq!(sq.term_count(), 6);
    }

    #[test]
    fn truncation_drops_high_degree() {
        let s = one(1, 3).add(&y(0, 1, 3));
        let cube = s.pow(3).unwrap(); // 1 + 3y + 3y^2 + y^3
        assert_eq!(
            cube.coefficient(&Monomial::new(vec![3])),
            Some(&rat(1, 1))
        );
        let t = cube.truncate(2);
        assert_eq!(t.coefficient(&Monomial::new(vec![3])), None);
        // mul truncates to the smaller degree
        let mixed = cube.mul(&s.truncate(1));
        assert_eq!(mixed.max_degree(), 1);
    }

    #[test]
    fn inverse_is_two_sided_and_errors_on_non_unit() {
        // a = 2 + y1 + 3 y2^2
        let a = MultiSeries::constant(2, 3, rat(2, 1))
            .add(&y(0, 2, 3))
            .add(&y(1, 2, 3).pow(2).unwrap().scale(&rat(3, 1)));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), one(2, 3));
        assert_eq!(inv.mul(&a), one(2, 3));
        // y1 has no constant term
        assert!(y(0, 2, 3).inverse().is_err());
    }

    #[test]
    fn negative_powers_through_inverse() {
        let a = one(1, 4).add(&y(0, 1, 4));
        let m2 = a.pow(-2).unwrap();
        // (1+y)^{-2} = 1 - 2y + 3y^2 - 4y^3 + 5y^4
        for (k, expect) in [(0i64, 1i64), (1, -2), (2, 3), (3, -4), (4, 5)] {
            assert_eq!(
                m2.coefficient(&Monomial::new(vec![k as u32]))
                    .cloned()
                    .unwrap(),
                rat(expect, 1)
            );
        }
    }

    #[test]
    fn evaluation_is_a_ring_map() {
        let a = one(2, 2).add(&y(0, 2, 2)).add(&y(1, 2, 2).scale(&rat(5, 1)));
        let b = one(2, 2).sub(&y(0, 2, 2).mul(&y(1, 2, 2)));
        let pt = vec![rat(1, 3), rat(-2, 7)];
        let lhs = a.mul(&b).evaluate(&pt);
        let rhs = a.evaluate(&pt) * b.evaluate(&pt);
        // mul truncates at degree 2 while the scalar product does not; the
        // degree-2 truncation of a*b differs from a(pt)*b(pt) by the dropped
        // degree-3 part, so compare against the truncated expansion by hand:
        // a*b = 1 + y1 + 5y2 - y1y2 - ... at degree 2: 1 + y1 + 5y2 - y1y2
        let expect = rat(1, 1) + rat(1, 3) + rat(5, 1) * rat(-2, 7)
            - rat(1, 3) * rat(-2, 7);
        assert_eq!(lhs, expect);
        assert_ne!(lhs, rhs, "truncation is visible at degree 3");
    }
}
