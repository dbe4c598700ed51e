//! Dense Laurent q-series over the rationals with precision tracking.
//!
//! A `QSeries` stores exact coefficients for the exponent window
//! `min_exp ..= order` (exponents below `min_exp` are exactly zero, those
//! above `order` are unknown). Arithmetic propagates the correct known
//! order: sums take the minimum, a product of series known through `A`,
//! `B` with valuations `va`, `vb` is known through
//! `min(A + vb, B + va)`, and inversion preserves relative precision. This
//! keeps every downstream identity check honest about which coefficients
//! it has actually verified.
//!
//! Equality ignores framing: two series are equal when their nonzero
//! stored coefficients agree; use [`QSeries::order`] when the known range
//! matters.

#[cfg(test)]
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct QSeries {
    min_exp: i64,
    /// Coefficients of q^min_exp, q^(min_exp+1), ..., q^order.
    coeffs: Vec<BigRational>,
    order: i64,
}

impl QSeries {
    /// The zero series, known through `order`.
    pub fn zero(order: i64) -> Self {
        QSeries {
            min_exp: order + 1,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn one(order: i64) -> Self {
        QSeries::monomial(0, BigRational::one(), order)
    }

    /// `c * q^k`, known through `order`.
    pub fn monomial(k: i64, c: BigRational, order: i64) -> Self {
        assert!(k <= order, "monomial exponent beyond requested order");
        let mut s = QSeries::zero(order);
        s.set(k, c);
        s
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BigRational)>, order: i64) -> Self {
        let mut s = QSeries::zero(order);
        for (k, c) in terms {
            assert!(k <= order, "term exponent beyond requested order");
            let old = s.coeff(k);
            s.set(k, old + c);
        }
        s
    }

    fn set(&mut self, k: i64, c: BigRational) {
        assert!(k <= self.order);
        if k < self.min_exp {
            if c.is_zero() {
                return;
            }
            let pad = (self.min_exp - k) as usize;
            let mut new_coeffs = vec![BigRational::zero(); pad];
            new_coeffs.extend(self.coeffs.drain(..));
            self.coeffs = new_coeffs;
            self.min_exp = k;
        }
        let idx = (k - self.min_exp) as usize;
        if idx >= self.coeffs.len() {
            self.coeffs.resize(idx + 1, BigRational::zero());
        }
        self.coeffs[idx] = c;
    }

    /// Exponent through which coefficients are known.
    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    /// Coefficient of q^k. Panics if `k` is beyond the known order; zero
    /// below the stored window.
    pub fn coeff(&self, k: i64) -> BigRational {
        assert!(
            k <= self.order,
            "coefficient of q^{k} requested but series is only known through q^{}",
            self.order
        );
        if k < self.min_exp {
            return BigRational::zero();
        }
        self.coeffs
            .get((k - self.min_exp) as usize)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// First exponent with a nonzero coefficient, `None` if the series is
    /// zero through its known order.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.min_exp + i as i64)
    }

    /// Valuation lower bound used for precision propagation: the true
    /// valuation, or `order + 1` when the series is zero as far as known.
    fn val_bound(&self) -> i64 {
        self.valuation().unwrap_or(self.order + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.min_exp + i as i64, c))
    }

    pub fn all_integer(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    pub fn truncate(&self, order: i64) -> Self {
        assert!(order <= self.order, "truncation cannot extend knowledge");
        let mut s = QSeries::zero(order);
        for (k, c) in self.iter_nonzero() {
            if k <= order {
                s.set(k, c.clone());
            }
        }
        s
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = c.clone() * r;
        }
        out
    }

    /// Multiplication by q^k.
    pub fn shift(&self, k: i64) -> Self {
        QSeries {
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
            order: self.order + k,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut out = QSeries::zero(order);
        for (k, c) in self.iter_nonzero() {
            if k <= order {
                out.set(k, c.clone());
            }
        }
        for (k, c) in rhs.iter_nonzero() {
            if k <= order {
                let old = out.coeff(k);
                out.set(k, old + c);
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let order = (self.order + rhs.val_bound()).min(rhs.order + self.val_bound());
        let mut out = QSeries::zero(order);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (i, a) in self.iter_nonzero() {
            for (j, b) in rhs.iter_nonzero() {
                let k = i + j;
                if k <= order {
                    let old = out.coeff(k);
                    out.set(k, old + a * b);
                }
            }
        }
        out
    }

    /// Inverse of a series with nonzero leading coefficient. Relative
    /// precision is preserved: a series known through `order` with
    /// valuation `v` yields an inverse known through `order - 2v`.
    pub fn inverse(&self) -> Result<Self> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::NotInvertible("q-series zero through its order".into()))?;
        let rel = (self.order - v) as usize;
        // Shift to a unit u = a_v + a_{v+1} q + ...; invert by the
        // convolution recurrence, then shift back by -v.
        let lead = self.coeff(v);
        let mut inv = vec![BigRational::zero(); rel + 1];
        inv[0] = lead.recip();
        for m in 1..=rel {
            let mut acc = BigRational::zero();
            for t in 1..=m {
                let c = self.coeff(v + t as i64);
                if !c.is_zero() {
                    acc += c * inv[m - t].clone();
                }
            }
            inv[m] = -acc / lead.clone();
        }
        Ok(QSeries {
            min_exp: -v,
            coeffs: inv,
            order: -v + rel as i64,
        })
    }

    /// Integer power; negative exponents go through [`Self::inverse`].
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        if e == 0 {
            return Ok(QSeries::one(self.order));
        }
        let mut acc: Option<QSeries> = None;
        let mut base = self.clone();
        let mut exp = e;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc.expect("positive exponent"))
    }
}

/// Equality of the known coefficients, ignoring framing and explicit zeros.
impl PartialEq for QSeries {
    fn eq(&self, other: &Self) -> bool {
        let mine: Vec<(i64, &BigRational)> = self.iter_nonzero().collect();
        let theirs: Vec<(i64, &BigRational)> = other.iter_nonzero().collect();
        mine == theirs
    }
}

/// Convenience: integer-coefficient series from i64 terms.
#[cfg(test)]
pub(crate) fn qs(terms: &[(i64, i64)], order: i64) -> QSeries {
    QSeries::from_terms(
        terms
            .iter()
            .map(|&(k, c)| (k, BigRational::from(BigInt::from(c)))),
        order,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_tracks_known_order_through_valuations() {
        // a = q + q^2 known to 5, b = q^{-1} + 1 known to 3:
        // product known through min(5 + (-1), 3 + 1) = 4.
        let a = qs(&[(1, 1), (2, 1)], 5);
        let b = qs(&[(-1, 1), (0, 1)], 3);
        let p = a.mul(&b);
        assert_eq!(p.order(), 4);
        assert_eq!(p, qs(&[(0, 1), (1, 2), (2, 1)], 4));
    }

    #[test]
    fn inverse_keeps_relative_precision() {
        // a = q - q^2 (v=1, known to 4, relative precision 3):
        // 1/a = q^{-1} (1-q)^{-1} = q^{-1} + 1 + q + q^2, known to 2.
        let a = qs(&[(1, 1), (2, -1)], 4);
        let inv = a.inverse().unwrap();
        assert_eq!(inv.order(), 2);
        assert_eq!(inv, qs(&[(-1, 1), (0, 1), (1, 1), (2, 1)], 2));
        assert_eq!(a.mul(&inv), qs(&[(0, 1)], 3));
    }

    #[test]
    fn zero_series_cannot_be_inverted() {
        assert!(QSeries::zero(5).inverse().is_err());
    }

    #[test]
    fn pow_handles_negative_exponents() {
        // (1 - q)^{-2} = 1 + 2q + 3q^2 + 4q^3
        let a = qs(&[(0, 1), (1, -1)], 3);
        let p = a.pow(-2).unwrap();
        assert_eq!(p, qs(&[(0, 1), (1, 2), (2, 3), (3, 4)], 3));
    }

    #[test]
    fn eta_product_prefix() {
        // q * prod_{n<=2} (1-q^n)^24 = q - 24 q^2 + ... through order 2.
        let f1 = qs(&[(0, 1), (1, -1)], 2).pow(24).unwrap();
        let f2 = qs(&[(0, 1), (2, -1)], 2).pow(24).unwrap();
        let p = f1.mul(&f2).shift(1).truncate(2);
        assert_eq!(p, qs(&[(1, 1), (2, -24)], 2));
    }

    #[test]
    fn equality_ignores_explicit_zeros_and_framing() {
        let a = QSeries::from_terms(
            vec![
                (0, BigRational::zero()),
                (2, BigRational::from(BigInt::from(7))),
            ],
            9,
        );
        let b = qs(&[(2, 7)], 2);
        assert_eq!(a, b);
        assert_ne!(a.order(), b.order());
    }
}
