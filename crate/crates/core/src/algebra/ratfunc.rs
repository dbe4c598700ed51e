//! Univariate polynomials and rational functions over the rationals.
//!
//! `RatFunc` is the coefficient field for series identities whose
//! coefficients live in Q(u), such as the Weierstrass relation between the
//! Tate parametrization series. Elements are kept in a canonical form
//! (numerator and denominator coprime, denominator monic), so structural
//! equality is field equality.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Dense univariate polynomial; trailing zeros are trimmed, zero is the
/// empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn variable() -> Self {
        UniPoly::monomial(1, BigRational::one())
    }

    pub fn monomial(k: usize, c: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        UniPoly::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        UniPoly::new(coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::new(coeffs)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| c * r).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = UniPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn divmod(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::ZeroDenominator("polynomial division by zero".into()));
        }
        let dd = d.degree().unwrap();
        let lead = d.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut quo = vec![
            BigRational::zero();
            self.coeffs.len().saturating_sub(d.coeffs.len()) + 1
        ];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading().unwrap() / lead.clone();
            quo[rd - dd] = factor.clone();
            rem = rem.sub(&UniPoly::monomial(rd - dd, factor).mul(d));
        }
        Ok((UniPoly::new(quo), rem))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.divmod(&y).expect("nonzero divisor");
            x = y;
            y = r;
        }
        match x.leading() {
            None => x,
            Some(l) => {
                let inv = l.recip();
                x.scale(&inv)
            }
        }
    }
}

/// Rational function in canonical form: `num/den` coprime, `den` monic.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator(
                "rational function with zero denominator".into(),
            ));
        }
        let g = UniPoly::gcd(&num, &den);
        let (num, den) = if g.degree().map_or(false, |d| d > 0) {
            let (qn, _) = num.divmod(&g)?;
            let (qd, _) = den.divmod(&g)?;
            (qn, qd)
        } else {
            (num, den)
        };
        let lead = den.leading().expect("nonzero denominator").recip();
        Ok(RatFunc {
            num: num.scale(&lead),
            den: den.scale(&lead),
        })
    }

    pub fn zero() -> Self {
        RatFunc {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(UniPoly::one())
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFunc {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        RatFunc::from_poly(UniPoly::constant(r))
    }

    pub fn variable() -> Self {
        RatFunc::from_poly(UniPoly::variable())
    }

    /// `u^k` for any integer `k`; negative powers land in the denominator.
    pub fn variable_pow(k: i64) -> Self {
        if k >= 0 {
            RatFunc::from_poly(UniPoly::monomial(k as usize, BigRational::one()))
        } else {
            RatFunc {
                num: UniPoly::one(),
                den: UniPoly::monomial((-k) as usize, BigRational::one()),
            }
        }
    }

    pub fn numerator(&self) -> &UniPoly {
        &self.num
    }

    pub fn denominator(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let num = self
            .num
            .mul(&rhs.den)
            .add(&rhs.num.mul(&self.den));
        let den = self.den.mul(&rhs.den);
        RatFunc::new(num, den).expect("product of nonzero denominators")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        RatFunc::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
            .expect("product of nonzero denominators")
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero rational function".into()));
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// Evaluate at a point where the denominator does not vanish.
    pub fn eval(&self, x: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::ZeroDenominator(format!(
                "rational function has a pole at u = {x}"
            )));
        }
        Ok(self.num.eval(x) / d)
    }
}

impl crate::algebra::Scalar for RatFunc {
    fn zero_like(&self) -> Self {
        RatFunc::zero()
    }

    fn one_like(&self) -> Self {
        RatFunc::one()
    }

    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }

    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        RatFunc::add(self, rhs)
    }

    fn mul(&self, rhs: &Self) -> Self {
        RatFunc::mul(self, rhs)
    }

    fn try_inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn poly(coeffs: &[i64]) -> UniPoly {
        UniPoly::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    #[test]
    fn reduction_is_canonical() {
        // (u^2 - 1)/(u - 1) reduces to u + 1.
        let f = RatFunc::new(poly(&[-1, 0, 1]), poly(&[-1, 1])).unwrap();
        assert_eq!(f, RatFunc::from_poly(poly(&[1, 1])));
        // (2u + 2)/2 normalizes its denominator to 1.
        let g = RatFunc::new(poly(&[2, 2]), poly(&[2])).unwrap();
        assert_eq!(g, RatFunc::from_poly(poly(&[1, 1])));
    }

    #[test]
    fn field_arithmetic() {
        // f = 1/(1-u), g = u/(1-u): f + g = (1+u)/(1-u)... check instead
        // f - f*u = (1-u)/(1-u) = 1.
        let one_minus_u = poly(&[1, -1]);
        let f = RatFunc::new(UniPoly::one(), one_minus_u.clone()).unwrap();
        let u = RatFunc::variable();
        assert_eq!(f.sub(&f.mul(&u)), RatFunc::one());
        let inv = f.inverse().unwrap();
        assert_eq!(f.mul(&inv), RatFunc::one());
        assert!(RatFunc::zero().inverse().is_err());
    }

    #[test]
    fn negative_variable_powers() {
        let um2 = RatFunc::variable_pow(-2);
        let u2 = RatFunc::variable_pow(2);
        assert_eq!(um2.mul(&u2), RatFunc::one());
    }

    #[test]
    fn evaluation_and_poles() {
        let f = RatFunc::new(poly(&[0, 1]), poly(&[1, -1])).unwrap(); // u/(1-u)
        assert_eq!(f.eval(&rat(2)).unwrap(), rat(-2));
        assert!(f.eval(&rat(1)).is_err());
    }

    #[test]
    fn divmod_euclid() {
        let a = poly(&[2, 0, 3, 1]); // x^3 + 3x^2 + 2
        let b = poly(&[1, 1]); // x + 1
        let (q, r) = a.divmod(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().map_or(true, |d| d < 1));
    }
}
