//! Eisenstein series, the Tate curve, and classical q-expansion
//! identities, all over exact rationals.
//!
//! The central objects are formal expansions in the multiplicative
//! parameter q. The one-variable side covers normalized Eisenstein
//! series `E_2k = 1 - (4k/B_2k) sum sigma_{2k-1}(n) q^n`, the modular
//! discriminant as the eta product `q prod (1-q^n)^24`, and the absolute
//! invariant `j = E4^3 / (E4^3 - E6^2)` (so `1728 j` has the familiar
//! expansion `q^{-1} + 744 + 196884 q + ...`). The two-variable side is
//! the Tate curve `y^2 + xy = x^3 + a4 x + a6` over Z((q)) together with
//! its parametrization X(u, q), Y(u, q) by series in q with coefficients
//! in Q(u); substituting them into the Weierstrass equation must give
//! exactly zero through the computed order, which exercises the entire
//! exact-series stack.
//!
//! The tail of the module collects arithmetic identities that fall out
//! of the same expansions: the weight-8 relation
//! `sigma_7 = sigma_3 + 120 (sigma_3 * sigma_3)`, Jacobi's four-square
//! count `8 sum_{d | n, 4 does not divide d} d`, and the weight-one
//! theta difference whose prime coefficients see the splitting of
//! `x^3 - x - 1` modulo p.

use num_bigint::BigInt;
use num_integer::{binomial, Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{Monomial, MultiSeries, QSeries, RatFunc, UniPoly};
use crate::{Error, Result};

/// Bernoulli number `B_n` (convention `B_1 = -1/2`), by the defining
/// recurrence `sum_j C(n+1, j) B_j = 0`.
pub fn bernoulli(n: usize) -> BigRational {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            let c = binomial(BigInt::from(m + 1), BigInt::from(j));
            acc += BigRational::from(c) * bj;
        }
        let bm = if m == 0 {
            BigRational::one()
        } else {
            -acc / BigRational::from(BigInt::from(m + 1))
        };
        b.push(bm);
    }
    b.pop().expect("loop ran at least once")
}

/// Divisor power sum `sigma_r(n) = sum_{d | n} d^r`; requires `n >= 1`.
pub fn sigma(r: u32, n: u64) -> BigInt {
    assert!(n >= 1, "sigma of a nonpositive integer");
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(r);
            let e = n / d;
            if e != d {
                acc += BigInt::from(e).pow(r);
            }
        }
        d += 1;
    }
    acc
}

/// Normalized Eisenstein series of even weight `2k >= 2`:
/// `1 - (4k / B_2k) sum sigma_{2k-1}(n) q^n`.
pub fn eisenstein(weight: u32, order: i64) -> Result<QSeries> {
    if weight < 2 || weight % 2 != 0 {
        return Err(Error::Precondition(format!(
            "Eisenstein weight must be even and at least 2, got {weight}"
        )));
    }
    let factor = -BigRational::from(BigInt::from(2 * weight)) / bernoulli(weight as usize);
    let mut s = QSeries::one(order);
    for n in 1..=order.max(0) {
        let c = factor.clone() * BigRational::from(sigma(weight - 1, n as u64));
        s = s.add(&QSeries::monomial(n, c, order));
    }
    Ok(s)
}

/// `zeta(2k) / pi^2k = (-1)^(k+1) 2^(2k-1) B_2k / (2k)!`, exact.
pub fn zeta_pi_ratio(weight: u32) -> Result<BigRational> {
    if weight < 2 || weight % 2 != 0 {
        return Err(Error::Precondition(format!(
            "zeta ratio needs even weight at least 2, got {weight}"
        )));
    }
    let k = weight / 2;
    let mut fact = BigInt::one();
    for i in 1..=weight {
        fact *= BigInt::from(i);
    }
    let two_pow = BigInt::from(2).pow(weight - 1);
    let sign = if k % 2 == 1 { 1 } else { -1 };
    Ok(BigRational::new(sign * two_pow, fact) * bernoulli(weight as usize))
}

/// Tate curve coefficient `a4(q) = -5 sum sigma_3(n) q^n`.
pub fn tate_a4(order: i64) -> QSeries {
    let mut s = QSeries::zero(order);
    for n in 1..=order.max(0) {
        let c = BigRational::from(BigInt::from(-5) * sigma(3, n as u64));
        s = s.add(&QSeries::monomial(n, c, order));
    }
    s
}

/// Tate curve coefficient
/// `a6(q) = -(1/12) sum (5 sigma_3(n) + 7 sigma_5(n)) q^n`. The division
/// by 12 is exact for every n (checked), a congruence the series
/// construction relies on to stay integral.
pub fn tate_a6(order: i64) -> QSeries {
    let twelve = BigInt::from(12);
    let mut s = QSeries::zero(order);
    for n in 1..=order.max(0) {
        let raw = BigInt::from(5) * sigma(3, n as u64) + BigInt::from(7) * sigma(5, n as u64);
        assert!(
            raw.is_multiple_of(&twelve),
            "5 sigma_3(n) + 7 sigma_5(n) not divisible by 12 at n = {n}"
        );
        let c = BigRational::from(-raw / &twelve);
        s = s.add(&QSeries::monomial(n, c, order));
    }
    let out = s;
    debug_assert!(out.all_integer());
    out
}

fn u_pow(k: i64) -> RatFunc {
    RatFunc::variable_pow(k)
}

fn rf_int(n: BigInt) -> RatFunc {
    RatFunc::from_rational(BigRational::from(n))
}

/// The series X(u, q) parametrizing the Tate curve: constant term
/// `u/(1-u)^2`, and for `m >= 1` the coefficient
/// `sum_{d | m} d (u^d + u^{-d}) - 2 sigma_1(m)`.
pub fn tate_x(order: u32) -> MultiSeries<RatFunc> {
    let one_minus_u = UniPoly::new(vec![BigRational::one(), -BigRational::one()]);
    let q0 = RatFunc::new(UniPoly::variable(), one_minus_u.pow(2)).expect("nonzero denominator");
    let mut terms = vec![(Monomial::one(), q0)];
    for m in 1..=order {
        let mut c = rf_int(BigInt::from(-2) * sigma(1, m as u64));
        for d in 1..=m as i64 {
            if m as i64 % d == 0 {
                let dd = rf_int(BigInt::from(d));
                c = c.add(&dd.mul(&u_pow(d).add(&u_pow(-d))));
            }
        }
        terms.push((Monomial::new(vec![m]), c));
    }
    MultiSeries::from_terms(1, order, RatFunc::one(), terms)
}

/// The series Y(u, q): constant term `u^2/(1-u)^3`, and for `m >= 1`
/// `sum_{d | m} (C(d,2) u^d - C(d+1,2) u^{-d}) + sigma_1(m)`.
pub fn tate_y(order: u32) -> MultiSeries<RatFunc> {
    let one_minus_u = UniPoly::new(vec![BigRational::one(), -BigRational::one()]);
    let q0 = RatFunc::new(UniPoly::variable().pow(2), one_minus_u.pow(3))
        .expect("nonzero denominator");
    let mut terms = vec![(Monomial::one(), q0)];
    for m in 1..=order {
        let mut c = rf_int(sigma(1, m as u64));
        for d in 1..=m as i64 {
            if m as i64 % d == 0 {
                let up = rf_int(BigInt::from(d * (d - 1) / 2)).mul(&u_pow(d));
                let dn = rf_int(BigInt::from(d * (d + 1) / 2)).mul(&u_pow(-d));
                c = c.add(&up.sub(&dn));
            }
        }
        terms.push((Monomial::new(vec![m]), c));
    }
    MultiSeries::from_terms(1, order, RatFunc::one(), terms)
}

/// `Y^2 + XY - X^3 - a4 X - a6` as a q-series with coefficients in
/// Q(u); the Weierstrass equation of the Tate curve makes it vanish
/// identically, so every coefficient through `order` must be zero.
pub fn tate_equation_residual(order: u32) -> MultiSeries<RatFunc> {
    let x = tate_x(order);
    let y = tate_y(order);
    let lift = |s: &QSeries| {
        MultiSeries::from_terms(
            1,
            order,
            RatFunc::one(),
            s.iter_nonzero().map(|(k, c)| {
                assert!(k >= 0);
                (
                    Monomial::new(vec![k as u32]),
                    RatFunc::from_rational(c.clone()),
                )
            }),
        )
    };
    let a4 = lift(&tate_a4(order as i64));
    let a6 = lift(&tate_a6(order as i64));
    let lhs = y.mul(&y).add(&x.mul(&y));
    let rhs = x.pow(3).expect("cube").add(&a4.mul(&x)).add(&a6);
    lhs.sub(&rhs)
}

/// The discriminant of `y^2 + xy = x^3 + a4 x + a6` expanded in the
/// a-invariants: `-a6 + a4^2 + 72 a4 a6 - 64 a4^3 - 432 a6^2`.
pub fn discriminant_combination(order: i64) -> QSeries {
    let a4 = tate_a4(order);
    let a6 = tate_a6(order);
    let t1 = a6.neg();
    let t2 = a4.mul(&a4);
    let t3 = a4.mul(&a6).scale(&BigRational::from(BigInt::from(72)));
    let t4 = a4
        .mul(&a4)
        .mul(&a4)
        .scale(&BigRational::from(BigInt::from(-64)));
    let t5 = a6
        .mul(&a6)
        .scale(&BigRational::from(BigInt::from(-432)));
    t1.add(&t2).add(&t3).add(&t4).add(&t5).truncate(order)
}

/// `q prod_{n>=1} (1 - q^n)^24`, the eta-product expansion of the
/// discriminant, truncated at `order`.
pub fn eta_product_24(order: i64) -> QSeries {
    let mut acc = QSeries::one(order);
    for n in 1..=order.max(0) {
        let f = QSeries::from_terms(
            vec![
                (0, BigRational::one()),
                (n, -BigRational::one()),
            ],
            order,
        );
        acc = acc.mul(&f.pow(24).expect("positive power")).truncate(order);
    }
    acc.shift(1).truncate(order)
}

/// `j = E4^3 / (E4^3 - E6^2)`; `1728 j` is the classical invariant with
/// expansion `q^{-1} + 744 + 196884 q + ...`. The denominator has a
/// simple zero at q = 0, so two orders of relative precision are spent:
/// the result is known through `order - 2`.
pub fn j_series(order: i64) -> Result<QSeries> {
    let e4 = eisenstein(4, order)?;
    let e6 = eisenstein(6, order)?;
    let e4_cubed = e4.pow(3)?.truncate(order);
    let den = e4_cubed.sub(&e6.pow(2)?.truncate(order));
    Ok(e4_cubed.mul(&den.inverse()?))
}

/// Residual of the convolution identity
/// `sigma_7(n) = sigma_3(n) + 120 sum_{m=1}^{n-1} sigma_3(m) sigma_3(n-m)`
/// (equivalently `E4^2 = E8`); zero through `order` when it holds.
pub fn sigma7_residual(order: i64) -> QSeries {
    let s3 = QSeries::from_terms(
        (1..=order.max(0)).map(|n| (n, BigRational::from(sigma(3, n as u64)))),
        order,
    );
    let s7 = QSeries::from_terms(
        (1..=order.max(0)).map(|n| (n, BigRational::from(sigma(7, n as u64)))),
        order,
    );
    let conv = s3.mul(&s3).truncate(order);
    s7.sub(&s3)
        .sub(&conv.scale(&BigRational::from(BigInt::from(120))))
}

/// Fourth power of the theta series `sum_{k in Z} q^(k^2)`; its n-th
/// coefficient counts representations of n as a sum of four squares.
pub fn theta_pow4(order: i64) -> QSeries {
    let mut theta = QSeries::one(order);
    let mut k = 1i64;
    while k * k <= order {
        theta = theta.add(&QSeries::monomial(
            k * k,
            BigRational::from(BigInt::from(2)),
            order,
        ));
        k += 1;
    }
    theta.pow(4).expect("positive power").truncate(order)
}

/// Jacobi's closed form `r4(n) = 8 sum_{d | n, 4 does not divide d} d`.
pub fn four_squares_closed_form(n: u64) -> BigInt {
    assert!(n >= 1);
    let mut acc = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 && d % 4 != 0 {
            acc += BigInt::from(d);
        }
    }
    acc * 8
}

/// Literal count of integer quadruples with `a^2+b^2+c^2+d^2 = n`.
pub fn four_squares_direct_count(n: u64) -> u64 {
    let s = (n as i64).sqrt() + 1;
    let mut count = 0u64;
    for a in -s..=s {
        for b in -s..=s {
            for c in -s..=s {
                let rem = n as i64 - a * a - b * b - c * c;
                if rem < 0 {
                    continue;
                }
                let d = rem.sqrt();
                if d * d == rem {
                    count += if d == 0 { 1 } else { 2 };
                }
            }
        }
    }
    count
}

/// Representation count of n by the binary form `a m^2 + b m k + c k^2`
/// (positive definite).
fn binary_form_count(a: i64, b: i64, c: i64, n: i64) -> i64 {
    let disc = 4 * a * c - b * b;
    assert!(a > 0 && disc > 0, "form must be positive definite");
    let mut count = 0;
    // a m^2 + b m k + c k^2 = n bounds k by the discriminant:
    // 4a n = (2a m + b k)^2 + disc k^2 >= disc k^2.
    let kmax = (4 * a * n / disc).sqrt() + 1;
    for k in -kmax..=kmax {
        // Solve a m^2 + (b k) m + (c k^2 - n) = 0 over the integers.
        let d2 = b * b * k * k - 4 * a * (c * k * k - n);
        if d2 < 0 {
            continue;
        }
        let d = d2.sqrt();
        if d * d != d2 {
            continue;
        }
        for root_sign in [1i64, -1] {
            let num = -b * k + root_sign * d;
            if num % (2 * a) == 0 {
                count += 1;
            }
            if d == 0 {
                break;
            }
        }
    }
    count
}

/// Coefficient a(n) of the weight-one cusp form
/// `(1/2) (sum q^(m^2+mk+6k^2) - sum q^(2m^2+mk+3k^2))` of level 23.
pub fn serre_form_coeff(n: u64) -> i64 {
    let n = n as i64;
    let diff = binary_form_count(1, 1, 6, n) - binary_form_count(2, 1, 3, n);
    assert!(diff % 2 == 0, "theta difference must be even");
    diff / 2
}

/// Number of roots of `x^3 - x - 1` modulo p.
pub fn cubic_root_count(p: u64) -> usize {
    (0..p)
        .filter(|&x| {
            let x = x as u128;
            let v = (x * x % p as u128 * x % p as u128 + 2 * p as u128 - x - 1) % p as u128;
            v == 0
        })
        .count()
}

/// Legendre symbol (p / 23) by Euler's criterion; 0 when 23 divides p.
pub fn legendre_mod_23(p: u64) -> i32 {
    let r = p % 23;
    if r == 0 {
        return 0;
    }
    let mut acc = 1u64;
    for _ in 0..11 {
        acc = acc * r % 23;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// The value the splitting trichotomy predicts for a(p), p prime and not
/// 23: 0 when p is inert in Q(sqrt(-23)) (the cubic then has exactly one
/// root mod p), 2 when `x^3 - x - 1` splits completely, -1 otherwise.
pub fn serre_predicted_coeff(p: u64) -> i64 {
    assert!(p != 23, "ramified prime excluded from the trichotomy");
    if legendre_mod_23(p) == -1 {
        0
    } else if cubic_root_count(p) == 3 {
        2
    } else {
        -1
    }
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if sieve[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                sieve[m] = false;
                m += p;
            }
        }
    }
    out
}

/// Convenience for tests: the q^k coefficient as an i64 (must be an
/// integer that fits).
pub fn coeff_i64(s: &QSeries, k: i64) -> i64 {
    let c = s.coeff(k);
    assert!(c.denom().is_one(), "coefficient is not an integer");
    c.numer().to_i64().expect("coefficient fits in i64")
}
