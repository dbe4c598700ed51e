//! Projective line and Moebius transformations over a generic scalar.
//!
//! A loxodromic transformation with fixed points t+ (attracting), t-
//! (repelling) and multiplier s is the matrix
//!
//! ```text
//!     [ t+ - s t-    (s - 1) t+ t- ]
//!     [ 1 - s        s t+ - t-     ]
//! ```
//!
//! with determinant s (t+ - t-)^2; its derivative at the fixed points is s
//! and 1/s. The same constructor serves both regimes: over the complex
//! numbers s is a number with 0 < |s| < 1, over a truncated multivariate
//! series ring s is a formal variable and the matrix entries are series.
//! Inverses are taken as adjugates, so no entry ever needs to be a unit;
//! division only happens when a projective point is read back in an
//! affine chart, and that step reports a clean error when the denominator
//! is not invertible (for series: when its constant term vanishes).

use crate::algebra::Scalar;
use crate::{Error, Result};

/// A point of the projective line as a pair `(p : q)`, `q = 0` meaning
/// infinity. Both coordinates zero is forbidden.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjValue<F: Scalar> {
    p: F,
    q: F,
}

impl<F: Scalar> ProjValue<F> {
    pub fn finite(x: F) -> Self {
        let q = x.one_like();
        ProjValue { p: x, q }
    }

    /// The point at infinity; `unit` supplies the ring context.
    pub fn infinity(unit: &F) -> Self {
        ProjValue {
            p: unit.one_like(),
            q: unit.zero_like(),
        }
    }

    pub fn from_pair(p: F, q: F) -> Result<Self> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::SingularConfiguration(
                "projective point (0 : 0)".into(),
            ));
        }
        Ok(ProjValue { p, q })
    }

    pub fn is_infinity(&self) -> bool {
        self.q.is_zero()
    }

    /// Reads the point in the affine chart; errors if the second
    /// coordinate is not invertible.
    pub fn to_affine(&self) -> Result<F> {
        match self.q.try_inv() {
            Some(qi) => Ok(self.p.mul(&qi)),
            None => Err(Error::NotInvertible(
                "projective point has no affine value (denominator not a unit)".into(),
            )),
        }
    }
}

/// `u x v = u.p v.q - v.p u.q`, the determinant pairing. It vanishes
/// exactly when the two points coincide (projectively), and plays the
/// role of the difference `u - v` inside cross-ratios.
pub fn cross<F: Scalar>(u: &ProjValue<F>, v: &ProjValue<F>) -> F {
    u.p.mul(&v.q).sub(&v.p.mul(&u.q))
}

/// Cross-ratio `[a, b; c, d] = (a-c)(b-d) / ((a-d)(b-c))`, computed
/// projectively so any argument may be infinity. Equals
/// `1 + (a-b)(c-d) / ((a-d)(b-c))`, the form in which it enters period
/// products. Errors when the denominator vanishes (degenerate
/// configuration) or is not a unit of the scalar ring.
pub fn cross_ratio<F: Scalar>(
    a: &ProjValue<F>,
    b: &ProjValue<F>,
    c: &ProjValue<F>,
    d: &ProjValue<F>,
) -> Result<F> {
    let num = cross(a, c).mul(&cross(b, d));
    let den = cross(a, d).mul(&cross(b, c));
    match den.try_inv() {
        Some(di) => Ok(num.mul(&di)),
        None if den.is_zero() => Err(Error::DegenerateCrossRatio(
            "coincident points in cross-ratio denominator".into(),
        )),
        None => Err(Error::NotInvertible(
            "cross-ratio denominator is not a unit".into(),
        )),
    }
}

/// A Moebius transformation `z -> (az + b)/(cz + d)` as an explicit
/// matrix. Scalar multiples act identically; nothing here normalizes.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusMap<F: Scalar> {
    pub a: F,
    pub b: F,
    pub c: F,
    pub d: F,
}

impl<F: Scalar> MoebiusMap<F> {
    pub fn new(a: F, b: F, c: F, d: F) -> Self {
        MoebiusMap { a, b, c, d }
    }

    pub fn identity(unit: &F) -> Self {
        MoebiusMap {
            a: unit.one_like(),
            b: unit.zero_like(),
            c: unit.zero_like(),
            d: unit.one_like(),
        }
    }

    /// The loxodromic map with the given fixed points and multiplier (see
    /// module docs). Requires distinct fixed points and nonzero
    /// multiplier; neither needs to be a unit.
    pub fn from_fixed_points(t_plus: &F, t_minus: &F, s: &F) -> Result<Self> {
        if t_plus.sub(t_minus).is_zero() {
            return Err(Error::SingularConfiguration(
                "coincident fixed points".into(),
            ));
        }
        if s.is_zero() {
            return Err(Error::SingularConfiguration("zero multiplier".into()));
        }
        let one = s.one_like();
        Ok(MoebiusMap {
            a: t_plus.sub(&s.mul(t_minus)),
            b: s.sub(&one).mul(t_plus).mul(t_minus),
            c: one.sub(s),
            d: s.mul(t_plus).sub(t_minus),
        })
    }

    pub fn det(&self) -> F {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    /// Matrix product `self * rhs`, i.e. the map applying `rhs` first.
    pub fn compose(&self, rhs: &Self) -> Self {
        MoebiusMap {
            a: self.a.mul(&rhs.a).add(&self.b.mul(&rhs.c)),
            b: self.a.mul(&rhs.b).add(&self.b.mul(&rhs.d)),
            c: self.c.mul(&rhs.a).add(&self.d.mul(&rhs.c)),
            d: self.c.mul(&rhs.b).add(&self.d.mul(&rhs.d)),
        }
    }

    /// Projective inverse via the adjugate; composing gives det * id.
    pub fn inverse(&self) -> Self {
        MoebiusMap {
            a: self.d.clone(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.a.clone(),
        }
    }

    pub fn apply(&self, v: &ProjValue<F>) -> ProjValue<F> {
        ProjValue {
            p: self.a.mul(&v.p).add(&self.b.mul(&v.q)),
            q: self.c.mul(&v.p).add(&self.d.mul(&v.q)),
        }
    }

    pub fn apply_affine(&self, x: &F) -> Result<F> {
        self.apply(&ProjValue::finite(x.clone())).to_affine()
    }

    /// Image of infinity, `a/c`, as a projective point.
    pub fn apply_infinity(&self) -> ProjValue<F> {
        ProjValue {
            p: self.a.clone(),
            q: self.c.clone(),
        }
    }

    /// Derivative `det / (cz + d)^2` at a finite point.
    pub fn derivative(&self, z: &F) -> Result<F> {
        let w = self.c.mul(z).add(&self.d);
        let w2 = w.mul(&w);
        match w2.try_inv() {
            Some(inv) => Ok(self.det().mul(&inv)),
            None => Err(Error::NotInvertible(
                "derivative at a pole of the transformation".into(),
            )),
        }
    }

    /// Whether two matrices define the same projective map: all six 2x2
    /// minors of the stacked 2x4 matrix vanish.
    pub fn proportional(&self, rhs: &Self) -> bool {
        let mine = [&self.a, &self.b, &self.c, &self.d];
        let other = [&rhs.a, &rhs.b, &rhs.c, &rhs.d];
        for i in 0..4 {
            for j in (i + 1)..4 {
                let minor = mine[i].mul(other[j]).sub(&mine[j].mul(other[i]));
                if !minor.is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_complex::Complex64;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn fixed_points_multiplier_and_infinity() {
        let (tp, tm, s) = (rat(3, 1), rat(-2, 1), rat(1, 5));
        let m = MoebiusMap::from_fixed_points(&tp, &tm, &s).unwrap();
        assert_eq!(m.apply_affine(&tp).unwrap(), tp);
        assert_eq!(m.apply_affine(&tm).unwrap(), tm);
        assert_eq!(m.derivative(&tp).unwrap(), s);
        assert_eq!(m.derivative(&tm).unwrap(), rat(5, 1));
        // m(infinity) = (t+ - s t-)/(1 - s) = (17/5)/(4/5) = 17/4.
        assert_eq!(m.apply_infinity().to_affine().unwrap(), rat(17, 4));
        assert_eq!(m.det(), s.clone() * (tp - tm).pow(2));
    }

    #[test]
    fn adjugate_inverts_projectively() {
        let m = MoebiusMap::from_fixed_points(&rat(1, 1), &rat(-1, 1), &rat(1, 7)).unwrap();
        let id = MoebiusMap::identity(&rat(1, 1));
        assert!(m.compose(&m.inverse()).proportional(&id));
        assert!(m.inverse().compose(&m).proportional(&id));
        assert!(!m.proportional(&id));
    }

    #[test]
    fn cross_ratio_agrees_with_direct_formula() {
        let pts = [rat(2, 1), rat(5, 1), rat(-1, 1), rat(7, 1)];
        let [a, b, c, d] = pts.clone();
        let direct = (a.clone() - c.clone()) * (b.clone() - d.clone())
            / ((a.clone() - d.clone()) * (b.clone() - c.clone()));
        let proj: Vec<_> = pts.iter().map(|x| ProjValue::finite(x.clone())).collect();
        let cr = cross_ratio(&proj[0], &proj[1], &proj[2], &proj[3]).unwrap();
        assert_eq!(cr, direct);
        // Additive form of the same quantity.
        let additive = rat(1, 1)
            + (a.clone() - b.clone()) * (c.clone() - d.clone())
                / ((a - d) * (b - c));
        assert_eq!(cr, additive);
    }

    #[test]
    fn cross_ratio_through_infinity() {
        // [a, b; c, oo] = (a - c)/(b - c).
        let (a, b, c) = (rat(4, 1), rat(9, 1), rat(1, 1));
        let cr = cross_ratio(
            &ProjValue::finite(a.clone()),
            &ProjValue::finite(b.clone()),
            &ProjValue::finite(c.clone()),
            &ProjValue::infinity(&a),
        )
        .unwrap();
        assert_eq!(cr, (a - c.clone()) / (b - c));
    }

    #[test]
    fn degenerate_cross_ratio_is_an_error() {
        let p = ProjValue::finite(rat(1, 1));
        let q = ProjValue::finite(rat(2, 1));
        assert!(matches!(
            cross_ratio(&p, &q, &q, &p),
            Err(Error::DegenerateCrossRatio(_))
        ));
    }

    #[test]
    fn complex_regime_round_trip() {
        let tp = Complex64::new(1.0, 0.0);
        let tm = Complex64::new(-1.0, 0.0);
        let s = Complex64::new(0.1, 0.02);
        let m = MoebiusMap::from_fixed_points(&tp, &tm, &s).unwrap();
        assert!((m.apply_affine(&tp).unwrap() - tp).norm() < 1e-14);
        assert!((m.apply_affine(&tm).unwrap() - tm).norm() < 1e-14);
        assert!((m.derivative(&tp).unwrap() - s).norm() < 1e-14);
        let back = m.inverse().apply_affine(&m.apply_affine(&tp).unwrap()).unwrap();
        assert!((back - tp).norm() < 1e-12);
    }
}
