//! Fourier expansions of Siegel modular forms and their classical producers.
//!
//! A degree-g expansion is a finite sum `F = sum_T a_T prod_{i<j} q_ij^{2t_ij}
//! prod_i q_ii^{t_ii}` over symmetric half-integral exponent matrices
//! `T = (t_ij)` with non-negative integer diagonal, truncated by the trace
//! `sum_i t_ii`. [`ExpMat`] stores `t_ii` on the diagonal and the integer
//! `2t_ij` off it.
//!
//! Theta constants with characteristics `a, b in {0, 1/2}^g`,
//!
//! ```text
//! theta[a,b](Z) = sum_{n in Z^g} exp(2 pi i (1/2 (n+a) Z (n+a)^t + (n+a) b^t)),
//! ```
//!
//! have exponents in `(1/8)Z`: the `q_ii` exponent is `(n_i+a_i)^2 / 2` and
//! the `q_ij` exponent is `(n_i+a_i)(n_j+a_j)`. [`FracExpansion`] stores all
//! exponents multiplied by 8, so a theta term contributes `(2n_i + 2a_i)^2`
//! to the i-th diagonal slot and `2 (2n_i+2a_i)(2n_j+2a_j)` off it, both
//! integers. The product of all even theta constants ([`theta_product`])
//! must clear the denominator 8 for g >= 3; the conversion asserts it term
//! by term rather than rounding.
//!
//! The lattice side: `L_{2n}` is the set of `x in R^{2n}` with `2x_i`,
//! `x_i - x_j` and `(1/2) sum_i x_i` all integers (so `E_8` for 2n = 8 and
//! `D_16^+` for 2n = 16). [`lattice_theta`] counts g-tuples of lattice
//! vectors by Gram matrix, and [`schottky_j`] forms the degree-4 weight-8
//! combination `(4/315) (theta(L_8 + L_8) - theta(L_16))` whose Fourier
//! coefficients measure the failure of the two lattices to be equivalent,
//! the classical form vanishing on Jacobians of genus-4 curves.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::{Error, Result};

/// Symmetric exponent matrix of a Fourier term: `diag[i]` holds the
/// non-negative integer `t_ii`, `off` holds the integers `2t_ij` for
/// `i < j` in row-major order. The same storage doubles as the "times 8"
/// encoding inside [`FracExpansion`] (diagonal `8 t_ii`, off-diagonal
/// `8 * 2t_ij / 2`, see the module doc).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpMat {
    g: usize,
    diag: Vec<i64>,
    off: Vec<i64>,
}

fn off_index(g: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < g);
    // row-major upper triangle: row i starts after i rows of lengths g-1, g-2, ...
    i * (2 * g - i - 1) / 2 + (j - i - 1)
}

impl ExpMat {
    /// The zero matrix of degree g (the constant term's exponent).
    pub fn zero(g: usize) -> Self {
        ExpMat {
            g,
            diag: vec![0; g],
            off: vec![0; g * g.saturating_sub(1) / 2],
        }
    }

    /// Build from the diagonal `t_ii` and the packed upper triangle `2t_ij`.
    pub fn from_parts(diag: Vec<i64>, off: Vec<i64>) -> Result<Self> {
        let g = diag.len();
        if off.len() != g * g.saturating_sub(1) / 2 {
            return Err(Error::Precondition(format!(
                "exponent matrix of degree {g} needs {} off-diagonal entries, got {}",
                g * g.saturating_sub(1) / 2,
                off.len()
            )));
        }
        if diag.iter().any(|&d| d < 0) {
            return Err(Error::Precondition(
                "negative diagonal exponent in Fourier term".into(),
            ));
        }
        Ok(ExpMat { g, diag, off })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn diag(&self) -> &[i64] {
        &self.diag
    }

    /// Stored off-diagonal value `2t_ij` (order of i, j irrelevant).
    pub fn off_entry(&self, i: usize, j: usize) -> i64 {
        if i == j {
            panic!("off_entry needs i != j");
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.off[off_index(self.g, i, j)]
    }

    pub fn trace(&self) -> i64 {
        self.diag.iter().sum()
    }

    /// Entrywise sum, the exponent of a product of two monomials.
    pub fn plus(&self, rhs: &ExpMat) -> ExpMat {
        debug_assert_eq!(self.g, rhs.g);
        ExpMat {
            g: self.g,
            diag: self.diag.iter().zip(&rhs.diag).map(|(a, b)| a + b).collect(),
            off: self.off.iter().zip(&rhs.off).map(|(a, b)| a + b).collect(),
        }
    }

    /// Conjugate by a coordinate permutation: entry (i, j) of the result is
    /// entry (perm[i], perm[j]) of self.
    pub fn permuted(&self, perm: &[usize]) -> ExpMat {
        assert_eq!(perm.len(), self.g);
        let mut out = ExpMat::zero(self.g);
        for i in 0..self.g {
            out.diag[i] = self.diag[perm[i]];
        }
        for i in 0..self.g {
            for j in (i + 1)..self.g {
                let (pi, pj) = (perm[i], perm[j]);
                let v = if pi == pj {
                    panic!("permutation is not injective")
                } else {
                    self.off_entry(pi, pj)
                };
                out.off[off_index(self.g, i, j)] = v;
            }
        }
        out
    }

    /// Exact positive semidefiniteness of the rational matrix T with
    /// `T_ii = diag[i]` and `T_ij = off/2`: every principal minor (all
    /// 2^g - 1 subsets, not just the leading ones) must be >= 0.
    pub fn is_positive_semidefinite(&self) -> bool {
        let g = self.g;
        let entry = |i: usize, j: usize| -> BigRational {
            if i == j {
                BigRational::from_integer(self.diag[i].into())
            } else {
                BigRational::new(self.off_entry(i, j).into(), 2.into())
            }
        };
        for subset in 1u32..(1u32 << g) {
            let idx: Vec<usize> = (0..g).filter(|&i| subset >> i & 1 == 1).collect();
            let m: Vec<Vec<BigRational>> = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| entry(i, j)).collect())
                .collect();
            if det_rational(&m).is_negative() {
                return false;
            }
        }
        true
    }
}

// Order by trace first so that maps iterate layer by layer; mul loops can
// stop early once the trace budget is exhausted.
impl Ord for ExpMat {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.g, self.trace(), &self.diag, &self.off).cmp(&(
            other.g,
            other.trace(),
            &other.diag,
            &other.off,
        ))
    }
}

impl PartialOrd for ExpMat {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    match n {
        0 => BigRational::one(),
        1 => m[0][0].clone(),
        _ => {
            // Laplace along the first row; matrices here are at most 4x4.
            let mut acc = BigRational::zero();
            for (j, top) in m[0].iter().enumerate() {
                if top.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigRational>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = top * det_rational(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

/// Classical Fourier expansion: finitely many terms `T -> a_T`, all with
/// `trace(T) <= max_trace`, zero coefficients never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierExpansion {
    g: usize,
    max_trace: i64,
    terms: BTreeMap<ExpMat, BigRational>,
}

impl FourierExpansion {
    pub fn zero(g: usize, max_trace: i64) -> Self {
        FourierExpansion {
            g,
            max_trace,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(g: usize, max_trace: i64, c: BigRational) -> Self {
        let mut out = Self::zero(g, max_trace);
        out.add_term(ExpMat::zero(g), c);
        out
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn max_trace(&self) -> i64 {
        self.max_trace
    }

    /// Add `c` to the coefficient of T; terms beyond the truncation are
    /// dropped, cancellations remove the key.
    pub fn add_term(&mut self, t: ExpMat, c: BigRational) {
        assert_eq!(t.g(), self.g, "degree mismatch");
        if c.is_zero() || t.trace() > self.max_trace {
            return;
        }
        let entry = self.terms.entry(t).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            // borrow of entry ends here; re-find the key to remove it
            let dead: Vec<ExpMat> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    pub fn coeff(&self, t: &ExpMat) -> BigRational {
        self.terms.get(t).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpMat, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> FourierExpansion {
        let mut out = Self::zero(self.g, self.max_trace);
        if c.is_zero() {
            return out;
        }
        for (t, a) in &self.terms {
            out.terms.insert(t.clone(), a * c);
        }
        out
    }

    pub fn add(&self, rhs: &FourierExpansion) -> FourierExpansion {
        assert_eq!(self.g, rhs.g, "degree mismatch");
        let mut out = Self::zero(self.g, self.max_trace.min(rhs.max_trace));
        for (t, a) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(t.clone(), a.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &FourierExpansion) -> FourierExpansion {
        self.add(&rhs.scale(&-BigRational::one()))
    }

    fn min_trace(&self) -> i64 {
        self.terms.keys().next().map_or(0, |t| t.trace())
    }

    /// Truncated product. The result is complete up to
    /// `min(self.max + rhs.min_trace, rhs.max + self.min_trace)`: a deeper
    /// term would need a factor beyond one of the truncations.
    pub fn mul(&self, rhs: &FourierExpansion) -> FourierExpansion {
        assert_eq!(self.g, rhs.g, "degree mismatch");
        let bound = (self.max_trace + rhs.min_trace()).min(rhs.max_trace + self.min_trace());
        let mut out = Self::zero(self.g, bound);
        for (ta, ca) in &self.terms {
            let room = bound - ta.trace();
            for (tb, cb) in &rhs.terms {
                if tb.trace() > room {
                    break; // keys ordered by trace
                }
                out.add_term(ta.plus(tb), ca * cb);
            }
        }
        out
    }

    /// True when every stored exponent matrix is positive semidefinite.
    pub fn all_psd(&self) -> bool {
        self.terms.keys().all(|t| t.is_positive_semidefinite())
    }
}

/// Fourier expansion with exponents in `(1/8)Z`, stored times 8: the
/// diagonal slot holds `8 * (q_ii exponent)` and the off slot holds
/// `8 * (q_ij exponent)`. Theta constants with characteristics live here;
/// coefficients are integers (signed lattice-point counts).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracExpansion {
    g: usize,
    max_trace_oct: i64,
    terms: BTreeMap<ExpMat, BigInt>,
}

impl FracExpansion {
    pub fn zero(g: usize, max_trace_oct: i64) -> Self {
        FracExpansion {
            g,
            max_trace_oct,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(g: usize, max_trace_oct: i64) -> Self {
        let mut out = Self::zero(g, max_trace_oct);
        out.add_term(ExpMat::zero(g), BigInt::one());
        out
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// Truncation bound on `sum_i 8 t_ii` (eight times the usual trace).
    pub fn max_trace_oct(&self) -> i64 {
        self.max_trace_oct
    }

    pub fn add_term(&mut self, t: ExpMat, c: BigInt) {
        assert_eq!(t.g(), self.g, "degree mismatch");
        if c.is_zero() || t.trace() > self.max_trace_oct {
            return;
        }
        let entry = self.terms.entry(t.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn coeff(&self, t: &ExpMat) -> BigInt {
        self.terms.get(t).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpMat, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_trace_oct(&self) -> Option<i64> {
        self.terms.keys().next().map(|t| t.trace())
    }

    pub fn mul(&self, rhs: &FracExpansion) -> FracExpansion {
        let a_min = self.min_trace_oct().unwrap_or(0);
        let b_min = rhs.min_trace_oct().unwrap_or(0);
        let bound = (self.max_trace_oct + b_min).min(rhs.max_trace_oct + a_min);
        self.mul_budget(rhs, bound)
    }

    /// Product keeping only terms with trace <= bound. The caller owns the
    /// correctness of the bound (theta products use per-factor minimal
    /// traces to justify it).
    fn mul_budget(&self, rhs: &FracExpansion, bound: i64) -> FracExpansion {
        assert_eq!(self.g, rhs.g, "degree mismatch");
        let mut out = Self::zero(self.g, bound);
        for (ta, ca) in &self.terms {
            let room = bound - ta.trace();
            for (tb, cb) in &rhs.terms {
                if tb.trace() > room {
                    break;
                }
                out.add_term(ta.plus(tb), ca * cb);
            }
        }
        out
    }

    /// Clear the denominator 8: every stored slot must be divisible by 8,
    /// giving an integral [`FourierExpansion`] with diagonal `t_ii = oct/8`
    /// and off-diagonal `2t_ij = oct/8`. A surviving fractional exponent is
    /// reported, not rounded.
    pub fn to_integer(&self) -> Result<FourierExpansion> {
        let mut out = FourierExpansion::zero(self.g, self.max_trace_oct.div_euclid(8));
        for (t, c) in &self.terms {
            if t.diag.iter().chain(t.off.iter()).any(|&v| v % 8 != 0) {
                return Err(Error::Internal(format!(
                    "fractional exponent survives in even theta product: \
                     diag {:?}, off {:?} (eighths)",
                    t.diag, t.off
                )));
            }
            let im = ExpMat {
                g: self.g,
                diag: t.diag.iter().map(|v| v / 8).collect(),
                off: t.off.iter().map(|v| v / 8).collect(),
            };
            out.add_term(im, BigRational::from_integer(c.clone()));
        }
        Ok(out)
    }

    pub fn all_psd(&self) -> bool {
        // scaling a symmetric matrix by 8 preserves semidefiniteness, so the
        // integer-encoding test applies verbatim to the oct encoding
        self.terms.keys().all(|t| t.is_positive_semidefinite())
    }
}

/// Theta constant with characteristic `(a, b) = (alpha/2, beta/2)`,
/// `alpha, beta in {0,1}^g`, as a [`FracExpansion`] complete for all terms
/// with `sum_i (2n_i + alpha_i)^2 <= max_trace_oct`.
///
/// The coefficient of the term at `n` is the sign
/// `exp(2 pi i (n+a) b^t) = (-1)^{sum_i n_i beta_i} * i^{alpha . beta}`,
/// which is real exactly when `alpha . beta` is even; odd characteristics
/// (whose theta constant vanishes identically) are rejected.
pub fn theta_constant(alpha: &[u8], beta: &[u8], max_trace_oct: i64) -> Result<FracExpansion> {
    let g = alpha.len();
    if g == 0 || beta.len() != g {
        return Err(Error::Precondition(
            "characteristic halves must be nonempty and of equal length".into(),
        ));
    }
    if alpha.iter().chain(beta.iter()).any(|&x| x > 1) {
        return Err(Error::Precondition(
            "characteristic entries must be 0 or 1 (meaning 0 or 1/2)".into(),
        ));
    }
    let pairing: i64 = alpha
        .iter()
        .zip(beta.iter())
        .map(|(&a, &b)| i64::from(a) * i64::from(b))
        .sum();
    if pairing % 2 != 0 {
        return Err(Error::Precondition(format!(
            "odd characteristic alpha={alpha:?} beta={beta:?}: theta vanishes identically"
        )));
    }
    let base_sign: i64 = if pairing % 4 == 2 { -1 } else { 1 };
    let mut out = FracExpansion::zero(g, max_trace_oct);
    if max_trace_oct < 0 {
        return Ok(out);
    }
    // enumerate m2 with m2_i = 2n_i + alpha_i, sum m2_i^2 <= budget
    let mut m2 = vec![0i64; g];
    enum_theta(alpha, beta, base_sign, max_trace_oct, 0, &mut m2, &mut out);
    Ok(out)
}

fn enum_theta(
    alpha: &[u8],
    beta: &[u8],
    base_sign: i64,
    remaining: i64,
    depth: usize,
    m2: &mut Vec<i64>,
    out: &mut FracExpansion,
) {
    let g = alpha.len();
    if depth == g {
        let mut t = ExpMat::zero(g);
        let mut sign = base_sign;
        for i in 0..g {
            t.diag[i] = m2[i] * m2[i];
            let n_i = (m2[i] - i64::from(alpha[i])) / 2;
            if beta[i] == 1 && n_i.rem_euclid(2) == 1 {
                sign = -sign;
            }
            for j in (i + 1)..g {
                t.off[off_index(g, i, j)] = 2 * m2[i] * m2[j];
            }
        }
        out.add_term(t, BigInt::from(sign));
        return;
    }
    let a = i64::from(alpha[depth]);
    let mut bound = 0i64;
    while (bound + 1) * (bound + 1) <= remaining {
        bound += 1;
    }
    // smallest value >= -bound with the right parity
    let mut v = if (-bound - a).rem_euclid(2) == 0 { -bound } else { -bound + 1 };
    while v <= bound {
        m2[depth] = v;
        enum_theta(alpha, beta, base_sign, remaining - v * v, depth + 1, m2, out);
        v += 2;
    }
    m2[depth] = 0;
}

/// All even characteristics `(alpha, beta)` of degree g, meaning
/// `alpha . beta` even, in ascending bit-mask order (bit i of the mask is
/// coordinate i). There are `2^{g-1} (2^g + 1)` of them.
pub fn even_characteristics(g: usize) -> Vec<(Vec<u8>, Vec<u8>)> {
    assert!(g >= 1 && g <= 16);
    let mut out = Vec::new();
    for am in 0u32..1 << g {
        for bm in 0u32..1 << g {
            if (am & bm).count_ones() % 2 == 0 {
                let alpha = (0..g).map(|i| (am >> i & 1) as u8).collect();
                let beta = (0..g).map(|i| (bm >> i & 1) as u8).collect();
                out.push((alpha, beta));
            }
        }
    }
    out
}

/// The literal sign product `prod (-1)^{sum_i b_i}` over all
/// `b in {0, 1/2}^g` with integer coordinate sum, i.e.
/// `(-1)^{sum_{k even} C(g,k) k/2}`. Evaluates to -1 for g = 2, 3 and
/// +1 for g = 4, 5 by direct enumeration.
pub fn even_char_sign(g: usize) -> i64 {
    assert!(g >= 1 && g <= 24);
    let mut exponent = 0u64;
    for bm in 0u64..1 << g {
        let k = bm.count_ones() as u64;
        if k % 2 == 0 {
            exponent += k / 2;
        }
    }
    if exponent % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Product of all even theta constants of degree g as a [`FracExpansion`],
/// complete for terms with oct-trace <= max_trace_oct.
///
/// Every factor's minimal oct-trace is the Hamming weight of its alpha (the
/// n_i that minimise `(2n_i + alpha_i)^2` give `alpha_i`), so a partial
/// product only needs terms within `budget - (minimal trace of the factors
/// still to come)`; that pruning makes the minimal layer of theta_3 (trace
/// 48 eighths) reachable in milliseconds.
pub fn theta_product_frac(g: usize, max_trace_oct: i64) -> Result<FracExpansion> {
    if g < 2 {
        return Err(Error::Precondition(
            "even theta product needs degree >= 2".into(),
        ));
    }
    let chars = even_characteristics(g);
    let mins: Vec<i64> = chars
        .iter()
        .map(|(a, _)| a.iter().map(|&x| i64::from(x)).sum())
        .collect();
    let total_min: i64 = mins.iter().sum();
    if max_trace_oct < total_min {
        // below the product's valuation: the truncation sees no terms
        return Ok(FracExpansion::zero(g, max_trace_oct));
    }
    let slack = max_trace_oct - total_min;
    let mut suffix = vec![0i64; chars.len() + 1];
    for k in (0..chars.len()).rev() {
        suffix[k] = suffix[k + 1] + mins[k];
    }
    let mut acc = FracExpansion::one(g, max_trace_oct);
    for (k, (alpha, beta)) in chars.iter().enumerate() {
        let factor = theta_constant(alpha, beta, mins[k] + slack)?;
        acc = acc.mul_budget(&factor, max_trace_oct - suffix[k + 1]);
        if acc.is_empty() {
            break;
        }
    }
    acc.max_trace_oct = max_trace_oct;
    Ok(acc)
}

/// Product of all even theta constants with integral exponents, complete to
/// `trace <= max_trace`. Fails (honestly) when a fractional exponent
/// survives: that happens for g = 2, whose minimal layer sits at trace 1
/// with half-integral diagonal; from g = 3 on the product clears the
/// denominator.
pub fn theta_product(g: usize, max_trace: i64) -> Result<FourierExpansion> {
    theta_product_frac(g, 8 * max_trace)?.to_integer()
}

/// A lattice built from the half-integral family `L_{2n}` by direct sums.
/// Vectors are handled in doubled coordinates `c = 2x`, so membership in
/// `L_{2n}` reads: all `c_i` integers of one parity with `sum c_i` divisible
/// by 4. `L_8` is the E8 root lattice and `L_16` is `D_16^+`.
#[derive(Clone, Debug)]
pub enum Lattice {
    HalfInt { dim: usize },
    Sum(Box<Lattice>, Box<Lattice>),
}

impl Lattice {
    /// `L_{dim}` itself; dim must be a positive multiple of 8 for the
    /// theta-series producers (evenness of the lattice).
    pub fn half_int(dim: usize) -> Self {
        assert!(dim > 0 && dim % 2 == 0, "L_{{2n}} needs even dimension");
        Lattice::HalfInt { dim }
    }

    pub fn direct_sum(a: Lattice, b: Lattice) -> Self {
        Lattice::Sum(Box::new(a), Box::new(b))
    }

    pub fn dim(&self) -> usize {
        match self {
            Lattice::HalfInt { dim } => *dim,
            Lattice::Sum(a, b) => a.dim() + b.dim(),
        }
    }

    /// Membership test on doubled coordinates.
    pub fn contains(&self, doubled: &[i64]) -> bool {
        match self {
            Lattice::HalfInt { dim } => {
                if doubled.len() != *dim {
                    return false;
                }
                let parity = doubled[0].rem_euclid(2);
                doubled.iter().all(|c| c.rem_euclid(2) == parity)
                    && doubled.iter().sum::<i64>().rem_euclid(4) == 0
            }
            Lattice::Sum(a, b) => {
                doubled.len() == self.dim()
                    && a.contains(&doubled[..a.dim()])
                    && b.contains(&doubled[a.dim()..])
            }
        }
    }

    /// Number of lattice vectors of the given norm `<x, x>`.
    pub fn shell_count(&self, norm: i64) -> u64 {
        match self {
            Lattice::HalfInt { dim } => {
                let mut count = 0u64;
                for_each_half_int(*dim, norm, &mut |_| count += 1);
                count
            }
            Lattice::Sum(a, b) => (0..=norm)
                .map(|n| a.shell_count(n) * b.shell_count(norm - n))
                .sum(),
        }
    }

    /// All vectors of the given norm, doubled coordinates, deterministic
    /// lexicographic order.
    pub fn shell_vectors(&self, norm: i64) -> Vec<Vec<i64>> {
        match self {
            Lattice::HalfInt { dim } => {
                let mut out = Vec::new();
                for_each_half_int(*dim, norm, &mut |c| out.push(c.to_vec()));
                out
            }
            Lattice::Sum(a, b) => {
                let mut out = Vec::new();
                for n in 0..=norm {
                    let left = a.shell_vectors(n);
                    if left.is_empty() {
                        continue;
                    }
                    let right = b.shell_vectors(norm - n);
                    for l in &left {
                        for r in &right {
                            let mut v = l.clone();
                            v.extend_from_slice(r);
                            out.push(v);
                        }
                    }
                }
                out
            }
        }
    }
}

/// Visit every vector of `L_dim` with `<x,x> = norm` (doubled coordinates,
/// ascending lexicographic). The two parity classes are enumerated
/// separately: even `c = 2d` needs `sum d_i^2 = norm` with even coordinate
/// sum, odd `c` needs `sum c_i^2 = 4 norm` with `sum c_i = 0 mod 4`.
fn for_each_half_int(dim: usize, norm: i64, f: &mut dyn FnMut(&[i64])) {
    if norm < 0 {
        return;
    }
    // even class
    let mut d = vec![0i64; dim];
    rec_even(&mut d, 0, norm, 0, f);
    // odd class: each coordinate contributes at least 1 to sum c^2
    let target = 4 * norm;
    if target >= dim as i64 {
        let mut c = vec![0i64; dim];
        rec_odd(&mut c, 0, target, 0, f);
    }
}

fn rec_even(d: &mut Vec<i64>, depth: usize, rem: i64, sum: i64, f: &mut dyn FnMut(&[i64])) {
    let dim = d.len();
    if depth == dim {
        if rem == 0 && sum.rem_euclid(2) == 0 {
            let doubled: Vec<i64> = d.iter().map(|x| 2 * x).collect();
            f(&doubled);
        }
        return;
    }
    let mut bound = 0i64;
    while (bound + 1) * (bound + 1) <= rem {
        bound += 1;
    }
    for v in -bound..=bound {
        d[depth] = v;
        rec_even(d, depth + 1, rem - v * v, sum + v, f);
    }
    d[depth] = 0;
}

fn rec_odd(c: &mut Vec<i64>, depth: usize, rem: i64, sum: i64, f: &mut dyn FnMut(&[i64])) {
    let dim = c.len();
    let left = (dim - depth) as i64;
    if depth == dim {
        if rem == 0 && sum.rem_euclid(4) == 0 {
            f(c);
        }
        return;
    }
    if rem < left {
        return; // every remaining odd coordinate needs c^2 >= 1
    }
    let mut bound = 1i64;
    while (bound + 2) * (bound + 2) <= rem - (left - 1) {
        bound += 2;
    }
    let mut v = -bound;
    while v <= bound {
        c[depth] = v;
        rec_odd(c, depth + 1, rem - v * v, sum + v, f);
        v += 2;
    }
    c[depth] = 0;
}

fn dot_quarter(a: &[i64], b: &[i64]) -> i64 {
    let d: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    debug_assert!(d % 4 == 0, "inner product not integral: {d}/4");
    d / 4
}

/// Degree-g theta series of an even lattice: the coefficient of T counts
/// g-tuples `(lambda_1, ..., lambda_g)` with `<lambda_i, lambda_i> = 2 t_ii`
/// and `<lambda_i, lambda_j> = 2 t_ij` (the stored off value), truncated by
/// `sum t_ii <= max_trace`. Deterministic: tuples are counted exactly, in
/// parallel over the first slot.
pub fn lattice_theta(lat: &Lattice, g: usize, max_trace: i64) -> FourierExpansion {
    assert!(g >= 1, "degree must be positive");
    assert!(lat.dim() % 8 == 0, "theta series needs an even lattice (8 | dim)");
    let mut out = FourierExpansion::zero(g, max_trace);
    if max_trace < 0 {
        return out;
    }
    if g == 1 {
        for t in 0..=max_trace {
            let count = lat.shell_count(2 * t);
            if count > 0 {
                let tm = ExpMat::from_parts(vec![t], vec![]).expect("degree-1 exponent");
                out.add_term(tm, BigRational::from_integer(count.into()));
            }
        }
        return out;
    }
    // shells by norm, even norms only (odd shells are empty when 8 | dim)
    let shells: BTreeMap<i64, Vec<Vec<i64>>> = (0..=max_trace)
        .map(|t| (2 * t, lat.shell_vectors(2 * t)))
        .filter(|(_, v)| !v.is_empty())
        .collect();
    let tops: Vec<(i64, &Vec<i64>)> = shells
        .iter()
        .flat_map(|(&norm, vecs)| vecs.iter().map(move |v| (norm, v)))
        .collect();
    let merged: BTreeMap<ExpMat, i64> = tops
        .par_iter()
        .map(|&(norm, first)| {
            let mut local: BTreeMap<ExpMat, i64> = BTreeMap::new();
            let mut chosen: Vec<&Vec<i64>> = vec![first];
            assemble_tuples(
                &shells,
                g,
                max_trace - norm / 2,
                &mut chosen,
                &mut local,
            );
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    for (t, count) in merged {
        out.add_term(t, BigRational::from_integer(count.into()));
    }
    out
}

fn assemble_tuples<'a>(
    shells: &'a BTreeMap<i64, Vec<Vec<i64>>>,
    g: usize,
    remaining: i64,
    chosen: &mut Vec<&'a Vec<i64>>,
    acc: &mut BTreeMap<ExpMat, i64>,
) {
    if chosen.len() == g {
        let mut t = ExpMat::zero(g);
        for (i, v) in chosen.iter().enumerate() {
            t.diag[i] = dot_quarter(v, v) / 2;
            for (j, w) in chosen.iter().enumerate().skip(i + 1) {
                t.off[off_index(g, i, j)] = dot_quarter(v, w);
            }
        }
        *acc.entry(t).or_insert(0) += 1;
        return;
    }
    for (&norm, vecs) in shells.range(0..=2 * remaining) {
        for v in vecs {
            chosen.push(v);
            assemble_tuples(shells, g, remaining - norm / 2, chosen, acc);
            chosen.pop();
        }
    }
}

/// Schottky's degree-4, weight-8 form
/// `J = (4/315) (theta(L_8 + L_8) - theta(L_16))` as a Fourier expansion.
/// The square of the degree-4 theta of `L_8` is taken via the direct sum,
/// which is exact and cheaper than multiplying expansions. Every coefficient
/// with trace <= 3 vanishes (the two lattices have the same Witt rank-3
/// behaviour); the guardrail refuses max_trace > 2 unless `allow_large` is
/// set, because the tuple enumeration cost grows steeply.
pub fn schottky_j(max_trace: i64, allow_large: bool) -> Result<FourierExpansion> {
    if max_trace > 2 && !allow_large {
        return Err(Error::ResourceGuard(format!(
            "schottky_j at max_trace {max_trace} enumerates degree-4 tuples over \
             61920-vector shells and beyond; pass allow_large to force it"
        )));
    }
    let l8 = Lattice::half_int(8);
    let sum = Lattice::direct_sum(l8.clone(), l8);
    let l16 = Lattice::half_int(16);
    let phi4_sq = lattice_theta(&sum, 4, max_trace);
    let phi8 = lattice_theta(&l16, 4, max_trace);
    let quot = BigRational::new(4.into(), 315.into());
    Ok(phi4_sq.sub(&phi8).scale(&quot))
}

fn restrict_terms<C: Clone>(
    g: usize,
    terms: &BTreeMap<ExpMat, C>,
) -> Result<BTreeMap<ExpMat, C>> {
    let mut out = BTreeMap::new();
    for (t, c) in terms {
        if t.diag[g - 1] != 0 {
            continue;
        }
        for i in 0..g - 1 {
            if t.off_entry(i, g - 1) != 0 {
                return Err(Error::Precondition(format!(
                    "t_{{{}g}} nonzero while t_gg = 0: exponent matrix is not \
                     positive semidefinite",
                    i + 1
                )));
            }
        }
        let mut small = ExpMat::zero(g - 1);
        small.diag.copy_from_slice(&t.diag[..g - 1]);
        for i in 0..g - 1 {
            for j in (i + 1)..g - 1 {
                small.off[off_index(g - 1, i, j)] = t.off_entry(i, j);
            }
        }
        out.insert(small, c.clone());
    }
    Ok(out)
}

/// Restriction to the boundary of degree g: keep the terms with `t_gg = 0`
/// (whose last row and column vanish by positive semidefiniteness) and
/// reindex them to degree g - 1. On product expansions this commutes with
/// multiplication.
pub fn boundary_restrict(f: &FourierExpansion) -> Result<FourierExpansion> {
    if f.g == 0 {
        return Err(Error::Precondition("already degree 0".into()));
    }
    let terms = restrict_terms(f.g, &f.terms)?;
    let mut out = FourierExpansion::zero(f.g - 1, f.max_trace);
    for (t, c) in terms {
        out.add_term(t, c);
    }
    Ok(out)
}

/// [`boundary_restrict`] for eighth-integral expansions.
pub fn boundary_restrict_frac(f: &FracExpansion) -> Result<FracExpansion> {
    if f.g == 0 {
        return Err(Error::Precondition("already degree 0".into()));
    }
    let terms = restrict_terms(f.g, &f.terms)?;
    let mut out = FracExpansion::zero(f.g - 1, f.max_trace_oct);
    for (t, c) in terms {
        out.add_term(t, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn em(diag: &[i64], off: &[i64]) -> ExpMat {
        ExpMat::from_parts(diag.to_vec(), off.to_vec()).unwrap()
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn genus_one_theta_constants() {
        // theta[0,0] = 1 + 2 q^{1/2} + 2 q^2 + ..., exponents n^2/2
        let t = theta_constant(&[0], &[0], 16).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.coeff(&em(&[0], &[])), int(1));
        assert_eq!(t.coeff(&em(&[4], &[])), int(2));
        assert_eq!(t.coeff(&em(&[16], &[])), int(2));
        // theta[0,1/2] flips the odd-n signs
        let t = theta_constant(&[0], &[1], 16).unwrap();
        assert_eq!(t.coeff(&em(&[0], &[])), int(1));
        assert_eq!(t.coeff(&em(&[4], &[])), int(-2));
        assert_eq!(t.coeff(&em(&[16], &[])), int(2));
        // theta[1/2,0] = 2 q^{1/8} + 2 q^{9/8} + ...
        let t = theta_constant(&[1], &[0], 9).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.coeff(&em(&[1], &[])), int(2));
        assert_eq!(t.coeff(&em(&[9], &[])), int(2));
        // the odd characteristic vanishes identically and is rejected
        assert!(theta_constant(&[1], &[1], 16).is_err());
    }

    #[test]
    fn even_characteristic_counts_match_closed_form() {
        for g in 1..=4usize {
            let count = even_characteristics(g).len();
            assert_eq!(count, (1 << (g - 1)) * ((1 << g) + 1));
        }
        assert_eq!(even_characteristics(2).len(), 10);
        assert_eq!(even_characteristics(3).len(), 36);
        assert_eq!(even_characteristics(4).len(), 136);
        // weight bookkeeping: each factor has weight 1/2
        assert_eq!(even_characteristics(3).len() / 2, 18);
    }

    #[test]
    fn even_char_sign_by_enumeration() {
        // sum_{k even} C(g,k) k/2: g=2 -> 1, g=3 -> 3, g=4 -> 8, g=5 -> 30
        assert_eq!(even_char_sign(2), -1);
        assert_eq!(even_char_sign(3), -1);
        assert_eq!(even_char_sign(4), 1);
        assert_eq!(even_char_sign(5), 1);
    }

    #[test]
    fn theta2_minimal_layer_is_the_frozen_pair() {
        // the ten-fold product has valuation 1 in the trace; its minimal
        // layer is 64 q11^{1/2} q22^{1/2} (q12^{-1/2} - q12^{1/2})
        let p = theta_product_frac(2, 8).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.coeff(&em(&[4, 4], &[-4])), int(64));
        assert_eq!(p.coeff(&em(&[4, 4], &[4])), int(-64));
        assert!(p.all_psd());
    }

    #[test]
    fn theta2_pruned_product_matches_naive_product() {
        // independent route: multiply the ten factors with the plain
        // truncated product, no per-factor budget analysis
        let mut naive = FracExpansion::one(2, 8);
        for (alpha, beta) in even_characteristics(2) {
            let f = theta_constant(&alpha, &beta, 8).unwrap();
            naive = naive.mul_budget(&f, 8);
        }
        let pruned = theta_product_frac(2, 8).unwrap();
        let naive_terms: Vec<_> = naive.terms().collect();
        let pruned_terms: Vec<_> = pruned.terms().collect();
        assert_eq!(naive_terms, pruned_terms);
    }

    #[test]
    fn theta2_integral_conversion_fails_honestly() {
        // the half-integral minimal layer obstructs clearing the
        // denominator at degree 2
        assert!(theta_product(2, 1).is_err());
    }

    #[test]
    fn theta3_empty_below_valuation_and_integral_at_it() {
        // minimal oct-trace is sum of alpha weights = 48, i.e. trace 6
        assert!(theta_product_frac(3, 47).unwrap().is_empty());
        let low = theta_product(3, 2).unwrap();
        assert!(low.is_zero());
        // at the valuation the layer is integral: diag (2,2,2)
        let layer = theta_product(3, 6).unwrap();
        assert!(!layer.is_empty());
        for (t, _) in layer.terms() {
            assert_eq!(t.diag(), &[2, 2, 2]);
            assert!(t.is_positive_semidefinite());
        }
        // theta_3 is symmetric in the coordinates: the characteristic set
        // is permutation closed
        for (t, c) in layer.terms() {
            for perm in [[1usize, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0]] {
                assert_eq!(layer.coeff(&t.permuted(&perm)), c.clone());
            }
        }
    }

    #[test]
    fn theta3_minimal_layer_against_direct_shell_fold() {
        // Independent oracle for the trace-6 layer: every factor is pinned
        // to its minimal shell (n_i in {0,-1} where alpha_i = 1), so the
        // layer is the fold of the 28 nonzero-alpha shells over the
        // off-diagonal exponents alone.
        let mut fold: BTreeMap<[i64; 3], BigInt> = BTreeMap::new();
        fold.insert([0, 0, 0], int(1));
        for (alpha, beta) in even_characteristics(3) {
            if alpha.iter().all(|&a| a == 0) {
                continue; // minimal shell is the constant 1
            }
            let pairing: i64 = alpha
                .iter()
                .zip(&beta)
                .map(|(&a, &b)| i64::from(a) * i64::from(b))
                .sum();
            let base = if pairing % 4 == 2 { -1i64 } else { 1 };
            let support: Vec<usize> =
                (0..3).filter(|&i| alpha[i] == 1).collect();
            let mut shell: Vec<([i64; 3], i64)> = Vec::new();
            for mask in 0u32..1 << support.len() {
                // bit set: n_i = -1, so m2_i = -1; clear: n_i = 0, m2_i = 1
                let mut m2 = [0i64; 3];
                let mut sign = base;
                for (bit, &i) in support.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        m2[i] = -1;
                        if beta[i] == 1 {
                            sign = -sign;
                        }
                    } else {
                        m2[i] = 1;
                    }
                }
                let off = [2 * m2[0] * m2[1], 2 * m2[0] * m2[2], 2 * m2[1] * m2[2]];
                shell.push((off, sign));
            }
            let mut next: BTreeMap<[i64; 3], BigInt> = BTreeMap::new();
            for (off_acc, coeff) in &fold {
                for (off, sign) in &shell {
                    let key = [
                        off_acc[0] + off[0],
                        off_acc[1] + off[1],
                        off_acc[2] + off[2],
                    ];
                    let e = next.entry(key).or_insert_with(BigInt::zero);
                    *e += coeff * int(*sign);
                }
            }
            next.retain(|_, v| !v.is_zero());
            fold = next;
        }
        let layer = theta_product_frac(3, 48).unwrap();
        assert_eq!(layer.len(), fold.len());
        for (off, coeff) in &fold {
            let t = em(&[16, 16, 16], off);
            assert_eq!(layer.coeff(&t), coeff.clone());
        }
    }

    #[test]
    fn e8_shells_and_membership() {
        let l8 = Lattice::half_int(8);
        assert_eq!(l8.shell_count(0), 1);
        assert_eq!(l8.shell_count(2), 240);
        assert_eq!(l8.shell_count(4), 2160);
        // all-halves vector (doubled: all ones) is a root
        assert!(l8.contains(&[1, 1, 1, 1, 1, 1, 1, 1]));
        // coordinate sum 2 mod 4 is excluded
        assert!(!l8.contains(&[1, 1, 1, 1, 1, 1, 1, -1]));
        // mixed parity is excluded
        assert!(!l8.contains(&[2, 1, 1, 1, 1, 1, 1, 1]));
        assert!(l8.contains(&[2, 2, 0, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn witt_coincidence_in_degree_one() {
        let l16 = Lattice::half_int(16);
        let l8 = Lattice::half_int(8);
        let sum = Lattice::direct_sum(l8.clone(), l8);
        let a = lattice_theta(&l16, 1, 3);
        let b = lattice_theta(&sum, 1, 3);
        assert_eq!(a, b);
        let shells: Vec<BigRational> = (0..=3)
            .map(|t| a.coeff(&em(&[t], &[])))
            .collect();
        let expect: Vec<BigRational> = [1i64, 480, 61920, 1050240]
            .iter()
            .map(|&n| BigRational::from_integer(n.into()))
            .collect();
        assert_eq!(shells, expect);
    }

    #[test]
    fn degree_two_theta_is_permutation_invariant_and_psd() {
        let l8 = Lattice::half_int(8);
        let t = lattice_theta(&l8, 2, 2);
        assert!(t.all_psd());
        for (m, c) in t.terms() {
            assert_eq!(t.coeff(&m.permuted(&[1, 0])), c.clone());
        }
        // embedded degree-1 data: tuples (lambda, 0) with norm 2
        assert_eq!(
            t.coeff(&em(&[1, 0], &[0])),
            BigRational::from_integer(240.into())
        );
    }

    #[test]
    fn schottky_j_vanishes_through_trace_two() {
        let j = schottky_j(2, false).unwrap();
        assert!(j.is_zero());
        assert!(matches!(
            schottky_j(3, false),
            Err(Error::ResourceGuard(_))
        ));
        // the difference vanishes because the two counts agree, not because
        // the counts are zero
        let l8 = Lattice::half_int(8);
        let sum = Lattice::direct_sum(l8.clone(), l8);
        let l16 = Lattice::half_int(16);
        let a = lattice_theta(&sum, 4, 1);
        let b = lattice_theta(&l16, 4, 1);
        let probe = em(&[1, 0, 0, 0], &[0, 0, 0, 0, 0, 0]);
        assert_eq!(a.coeff(&probe), BigRational::from_integer(480.into()));
        assert_eq!(a.coeff(&probe), b.coeff(&probe));
    }

    #[test]
    fn boundary_restriction_examples() {
        // constant -> constant
        let c = FourierExpansion::constant(2, 3, BigRational::from_integer(7.into()));
        let r = boundary_restrict(&c).unwrap();
        assert_eq!(r.coeff(&ExpMat::zero(1)), BigRational::from_integer(7.into()));
        // q_11 at degree 1 -> empty degree-0 expansion
        let mut f = FourierExpansion::zero(1, 3);
        f.add_term(em(&[1], &[]), BigRational::one());
        let r = boundary_restrict(&f).unwrap();
        assert_eq!(r.g(), 0);
        assert!(r.is_zero());
        // theta[0,0] of degree 2 restricts to theta[0,0] of degree 1
        // (the n_2 = 0 slice)
        let big = theta_constant(&[0, 0], &[0, 0], 16).unwrap();
        let small = theta_constant(&[0], &[0], 16).unwrap();
        let restricted = boundary_restrict_frac(&big).unwrap();
        let a: Vec<_> = restricted.terms().collect();
        let b: Vec<_> = small.terms().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn boundary_restriction_commutes_with_products() {
        let f = theta_constant(&[0, 0], &[0, 0], 24).unwrap();
        let g = theta_constant(&[0, 0], &[1, 1], 24).unwrap();
        let lhs = boundary_restrict_frac(&f.mul(&g)).unwrap();
        let rhs = boundary_restrict_frac(&f)
            .unwrap()
            .mul(&boundary_restrict_frac(&g).unwrap());
        let a: Vec<_> = lhs.terms().collect();
        let b: Vec<_> = rhs.terms().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn boundary_restriction_rejects_indefinite_input() {
        let mut f = FourierExpansion::zero(2, 3);
        // t_22 = 0 but t_12 = 1/2: not positive semidefinite
        f.add_term(em(&[1, 0], &[1]), BigRational::one());
        assert!(boundary_restrict(&f).is_err());
    }

    #[test]
    fn psd_check_catches_negative_correlation() {
        // [[1, 3/2], [3/2, 1]] has determinant -5/4
        assert!(!em(&[1, 1], &[3]).is_positive_semidefinite());
        assert!(em(&[1, 1], &[2]).is_positive_semidefinite());
        assert!(em(&[1, 1], &[-2]).is_positive_semidefinite());
        // degenerate rank-1 matrix passes
        assert!(em(&[1, 1], &[2]).is_positive_semidefinite());
        // zero diagonal with nonzero off entry fails on the 2x2 minor
        assert!(!em(&[1, 0], &[1]).is_positive_semidefinite());
    }

    #[test]
    fn fourier_mul_truncation_is_sound() {
        // (1 + q11)(1 + q11) complete to trace 2 when both factors are
        let mut f = FourierExpansion::zero(1, 2);
        f.add_term(ExpMat::zero(1), BigRational::one());
        f.add_term(em(&[1], &[]), BigRational::one());
        let sq = f.mul(&f);
        assert_eq!(sq.coeff(&em(&[2], &[])), BigRational::one());
        assert_eq!(
            sq.coeff(&em(&[1], &[])),
            BigRational::from_integer(2.into())
        );
        // a valuation-1 factor known to trace 3 pushes the product's
        // reliable range past either single truncation
        let mut v1 = FourierExpansion::zero(1, 3);
        v1.add_term(em(&[1], &[]), BigRational::one());
        assert_eq!(f.mul(&v1).max_trace(), 3);
        // but a factor only known to trace 2 cannot
        let mut v2 = FourierExpansion::zero(1, 2);
        v2.add_term(em(&[1], &[]), BigRational::one());
        assert_eq!(f.mul(&v2).max_trace(), 2);
    }
}
