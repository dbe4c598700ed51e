//! Quotients of integer multivariate polynomials.
//!
//! The field of fractions of the cross-ratio ring is represented as
//! numerator/denominator pairs. Normalization divides out the integer
//! content of both parts and makes the grlex-leading coefficient of the
//! denominator positive; no polynomial GCD is attempted, so a fraction is
//! not unique and equality is decided by cross-multiplication. This keeps
//! arithmetic cheap and exact; symbolic computations therefore only scale
//! to small word length and truncation degree, with evaluated (rational)
//! coefficients as the scalable mode.

use super::multipoly::{is_sign_negative, MultiPoly};
use super::scalar::Scalar;
use crate::{Error, Result};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug)]
pub struct PolyFraction {
    num: MultiPoly,
    den: MultiPoly,
}

impl PolyFraction {
    /// Builds `num/den`, normalizing. Errors if `den` is the zero
    /// polynomial.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator("polynomial fraction".into()));
        }
        let mut f = PolyFraction { num, den };
        f.normalize();
        Ok(f)
    }

    pub fn zero() -> Self {
        PolyFraction {
            num: MultiPoly::zero(),
            den: MultiPoly::one(),
        }
    }

    pub fn one() -> Self {
        PolyFraction {
            num: MultiPoly::one(),
            den: MultiPoly::one(),
        }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        PolyFraction {
            num: p,
            den: MultiPoly::one(),
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        PolyFraction {
            num: MultiPoly::constant(r.numer().clone()),
            den: MultiPoly::constant(r.denom().clone()),
        }
    }

    pub fn variable(slot: usize) -> Self {
        PolyFraction::from_poly(MultiPoly::variable(slot))
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    /// Zero when normalized: the numerator is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Content/sign normalization. Keeps `den` with positive leading
    /// coefficient and the pair with coprime integer content.
    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = MultiPoly::one();
            return;
        }
        let c = self.num.content().gcd(&self.den.content());
        if !c.is_one() {
            self.num = self.num.div_exact(&c);
            self.den = self.den.div_exact(&c);
        }
        if is_sign_negative(&self.den.leading_coefficient()) {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
    }

    pub fn neg(&self) -> Self {
        PolyFraction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        // Shared denominators are common in the phi/psi pipelines; adding
        // numerators directly avoids squaring the denominator degree.
        let mut out = if self.den == rhs.den {
            PolyFraction {
                num: self.num.add(&rhs.num),
                den: self.den.clone(),
            }
        } else {
            PolyFraction {
                num: self
                    .num
                    .mul(&rhs.den)
                    .add(&rhs.num.mul(&self.den)),
                den: self.den.mul(&rhs.den),
            }
        };
        out.normalize();
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = PolyFraction {
            num: self.num.mul(&rhs.num),
            den: self.den.mul(&rhs.den),
        };
        out.normalize();
        out
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero polynomial fraction".into()));
        }
        let mut out = PolyFraction {
            num: self.den.clone(),
            den: self.num.clone(),
        };
        out.normalize();
        Ok(out)
    }

    /// Equality in the fraction field: `a.num * b.den == b.num * a.den`.
    pub fn fraction_equal(&self, rhs: &Self) -> bool {
        self.num.mul(&rhs.den) == rhs.num.mul(&self.den)
    }

    /// Evaluates at rational values indexed by slot; errors if the
    /// denominator vanishes at the point.
    pub fn eval(&self, values: &[BigRational]) -> Result<BigRational> {
        let den = self.den.eval(values);
        if Zero::is_zero(&den) {
            return Err(Error::ZeroDenominator(
                "fraction evaluated at a pole".into(),
            ));
        }
        Ok(self.num.eval(values) / den)
    }

    /// Applies the hyperelliptic substitution `x_{-k} -> -x_k` to both
    /// parts; errors if the denominator collapses to zero.
    pub fn mirror_negate(&self, g: usize) -> Result<Self> {
        PolyFraction::new(self.num.mirror_negate(g), self.den.mirror_negate(g))
    }

    /// Scalar multiplication by an exact rational.
    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = PolyFraction {
            num: self.num.mul(&MultiPoly::constant(r.numer().clone())),
            den: self.den.mul(&MultiPoly::constant(r.denom().clone())),
        };
        out.normalize();
        out
    }
}

/// Structural equality of the normalized representation. Fractions that are
/// equal in the field but carry a common polynomial factor compare unequal
/// here; use [`PolyFraction::fraction_equal`] for field equality.
impl PartialEq for PolyFraction {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for PolyFraction {}

impl Scalar for PolyFraction {
    fn zero_like(&self) -> Self {
        PolyFraction::zero()
    }
    fn one_like(&self) -> Self {
        PolyFraction::one()
    }
    fn is_zero(&self) -> bool {
        PolyFraction::is_zero(self)
    }
    fn neg(&self) -> Self {
        PolyFraction::neg(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        PolyFraction::add(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        PolyFraction::mul(self, rhs)
    }
    fn try_inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use crate::algebra::multipoly::slot;

    fn x(i: i32) -> PolyFraction {
        PolyFraction::variable(slot(i))
    }

    fn int(n: i64) -> PolyFraction {
        PolyFraction::from_poly(MultiPoly::constant(BigInt::from(n)))
    }

    #[test]
    fn field_axioms_on_small_fractions() {
        // a = x1/(x1 - x2), b = (x2 + 1)/x1
        let a = x(1).mul(&x(1).sub(&x(2)).inverse().unwrap());
        let b = x(2).add(&int(1)).mul(&x(1).inverse().unwrap());
        let ab = a.mul(&b);
        assert!(ab.mul(&b.inverse().unwrap()).fraction_equal(&a));
        let sum = a.add(&b);
        assert!(sum.sub(&b).fraction_equal(&a));
        assert!(a.mul(&a.inverse().unwrap()).fraction_equal(&int(1)));
    }

    #[test]
    fn fraction_equal_sees_through_common_factors() {
        // x1/x2 == x1*(x1+x2) / (x2*(x1+x2))
        let lhs = x(1).mul(&x(2).inverse().unwrap());
        let common = x(1).add(&x(2));
        let rhs = x(1)
            .mul(&common)
            .mul(&x(2).mul(&common).inverse().unwrap());
        assert!(lhs.fraction_equal(&rhs));
        assert_ne!(lhs, rhs, "structural equality is finer");
    }

    #[test]
    fn normalization_fixes_content_and_sign() {
        // (-2 x1) / (-4 x2) -> (x1) / (2 x2)
        let f = PolyFraction::new(
            MultiPoly::constant(BigInt::from(-2)).mul(&MultiPoly::variable(0)),
            MultiPoly::constant(BigInt::from(-4)).mul(&MultiPoly::variable(2)),
        )
        .unwrap();
        assert_eq!(f.numerator().leading_coefficient(), BigInt::from(1));
        assert_eq!(f.denominator().leading_coefficient(), BigInt::from(2));
    }

    #[test]
    fn zero_denominator_is_an_error() {
        assert!(PolyFraction::new(MultiPoly::one(), MultiPoly::zero()).is_err());
        assert!(PolyFraction::zero().inverse().is_err());
    }

    #[test]
    fn evaluation_commutes_with_arithmetic() {
        let a = x(1).add(&int(2)).mul(&x(2).inverse().unwrap());
        let b = x(2).sub(&x(1));
        // Slots are (x_1, x_{-1}, x_2); x_{-1} is absent but the point
        // is indexed by slot, so it still gets a (dummy) entry.
        let vals = vec![
            BigRational::new(BigInt::from(3), BigInt::from(2)),
            BigRational::from(BigInt::from(0)),
            BigRational::from(BigInt::from(-5)),
        ];
        let lhs = a.mul(&b).eval(&vals).unwrap();
        let rhs = a.eval(&vals).unwrap() * b.eval(&vals).unwrap();
        assert_eq!(lhs, rhs);
    }
}
