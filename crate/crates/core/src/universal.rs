//! Universal periods: the multiplicative period matrix of the universal
//! deformation of a totally degenerate curve, as exact power series.
//!
//! The configuration space is the one-vertex, g-loop case: 2g moduli
//! symbols `x_{+-1}, ..., x_{+-g}` (the fixed points) and g deformation
//! variables `y_1, ..., y_g` (the multipliers). Over the coefficient ring
//! the generator `phi_i` is the Moebius map with fixed points `x_i`,
//! `x_{-i}` and multiplier `y_i`,
//!
//! ```text
//! phi_i(alpha) = (x_i - (alpha - x_i) x_{-i} y_i / (alpha - x_{-i}))
//!                * (1 - (alpha - x_i) y_i / (alpha - x_{-i}))^{-1},
//! ```
//!
//! so `phi_i(alpha) = x_i mod (y_1, ..., y_g)` and `phi_{-i} = phi_i^{-1}`
//! uses the same `y_i`. The period `p_ij` is the product over double-coset
//! words `w` (first letter avoiding `{i,-i}`, last avoiding `{j,-j}`) of
//!
//! ```text
//! psi_ij(w) = 1 + (x_i - x_{-i})(w(x_j) - w(x_{-j}))
//!                 / ((x_i - w(x_{-j}))(x_{-i} - w(x_j))),
//! ```
//!
//! with the identity word contributing the cross-ratio `c_ij` for i != j
//! and the bare multiplier `y_i` for i = j. A word of length n contributes
//! `1 mod I^n` where `I = (y_1, ..., y_g)`, so truncation at total y-degree
//! D needs only words of length <= D: that is the whole truncation policy.
//!
//! Coefficients are either symbolic ([`PolyFraction`] in the `x` slots) or
//! evaluated (`BigRational` at caller-supplied points). The hyperelliptic
//! specialization substitutes `x_{-k} = -x_k`, turning `c_ij` into
//! `(x_i - x_j)^2 / (x_i + x_j)^2`; it needs `2 x_i` and `x_i +- x_j`
//! invertible. [`substitute_periods`] plugs a period table into a Siegel
//! Fourier expansion, the arithmetic form of the Schottky-problem test, and
//! [`lowest_term_check`] evaluates the minimal-trace layer of such an
//! expansion on the cross-ratios alone.

use num_rational::BigRational;

use crate::algebra::{slot, MultiSeries, PolyFraction, Scalar};
use crate::moebius::{cross_ratio, MoebiusMap, ProjValue};
use crate::siegel::FourierExpansion;
use crate::words::{double_coset_reps, GeneratorSystem};
use crate::{Error, Result};

/// The 2g moduli values (or symbols) of a period computation, slot-indexed
/// like the polynomial ring: `x_i` at slot `2(i-1)`, `x_{-i}` right after.
/// The deformation variables `y_1, ..., y_g` map to series variables
/// `0, ..., g-1`.
#[derive(Clone, Debug)]
pub struct PeriodSetup<C: Scalar> {
    g: usize,
    x: Vec<C>,
    unit: C,
}

impl<C: Scalar> PeriodSetup<C> {
    pub fn g(&self) -> usize {
        self.g
    }

    /// The value of the symbol `x_letter`, letter in `{+-1, ..., +-g}`.
    pub fn x(&self, letter: i32) -> &C {
        assert!(letter != 0 && letter.unsigned_abs() as usize <= self.g);
        &self.x[slot(letter)]
    }

    pub fn unit(&self) -> &C {
        &self.unit
    }

    /// The slot-indexed value vector (length 2g).
    pub fn values(&self) -> &[C] {
        &self.x
    }
}

/// Fully symbolic setup: `x_{+-i}` are the polynomial-fraction variables
/// themselves.
pub fn symbolic_setup(g: usize) -> PeriodSetup<PolyFraction> {
    assert!(g >= 1);
    let x = (0..2 * g).map(PolyFraction::variable).collect();
    PeriodSetup {
        g,
        x,
        unit: PolyFraction::one(),
    }
}

/// Symbolic setup with `x_{-k}` replaced by `-x_k` from the start; the
/// coefficients then live in the g-variable subring.
pub fn hyperelliptic_symbolic_setup(g: usize) -> PeriodSetup<PolyFraction> {
    assert!(g >= 1);
    let mut x = Vec::with_capacity(2 * g);
    for k in 1..=g {
        let v = PolyFraction::variable(slot(k as i32));
        x.push(v.clone());
        x.push(v.neg());
    }
    PeriodSetup {
        g,
        x,
        unit: PolyFraction::one(),
    }
}

/// Evaluated setup from 2g slot-indexed rational points
/// `(x_1, x_{-1}, x_2, x_{-2}, ...)`; the points must be pairwise distinct
/// or every cross-ratio in sight degenerates.
pub fn evaluated_setup(g: usize, points: &[BigRational]) -> Result<PeriodSetup<BigRational>> {
    if g == 0 || points.len() != 2 * g {
        return Err(Error::Precondition(format!(
            "rank {g} needs exactly {} evaluation points, got {}",
            2 * g,
            points.len()
        )));
    }
    for a in 0..points.len() {
        for b in (a + 1)..points.len() {
            if points[a] == points[b] {
                return Err(Error::SingularConfiguration(format!(
                    "evaluation points in slots {a} and {b} coincide"
                )));
            }
        }
    }
    Ok(PeriodSetup {
        g,
        x: points.to_vec(),
        unit: BigRational::from_integer(1.into()),
    })
}

/// Evaluated hyperelliptic setup from the g points `x_1, ..., x_g`; sets
/// `x_{-k} = -x_k` and checks the base-ring units `2 x_i` and `x_i +- x_j`.
pub fn hyperelliptic_evaluated_setup(
    g: usize,
    points: &[BigRational],
) -> Result<PeriodSetup<BigRational>> {
    if g == 0 || points.len() != g {
        return Err(Error::Precondition(format!(
            "hyperelliptic rank {g} needs {g} points, got {}",
            points.len()
        )));
    }
    for (a, p) in points.iter().enumerate() {
        if Scalar::is_zero(p) {
            return Err(Error::Precondition(format!(
                "2 x_{} must be invertible, got x = 0",
                a + 1
            )));
        }
        for (b, q) in points.iter().enumerate().skip(a + 1) {
            if p == q || *p == -q {
                return Err(Error::Precondition(format!(
                    "x_{} +- x_{} must be invertible",
                    a + 1,
                    b + 1
                )));
            }
        }
    }
    let mut x = Vec::with_capacity(2 * g);
    for p in points {
        x.push(p.clone());
        x.push(-p);
    }
    Ok(PeriodSetup {
        g,
        x,
        unit: BigRational::from_integer(1.into()),
    })
}

/// The stock evaluation point `(1, -1, 2, -2, ..., g, -g)` (slot order), a
/// generic-enough rational configuration that happens to be hyperelliptic.
pub fn standard_points(g: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(2 * g);
    for k in 1..=g as i64 {
        out.push(BigRational::from_integer(k.into()));
        out.push(BigRational::from_integer((-k).into()));
    }
    out
}

/// The cross-ratio `c_ij = (x_i - x_j)(x_{-i} - x_{-j}) /
/// ((x_i - x_{-j})(x_{-i} - x_j))`, the constant term of `p_ij` for i != j
/// and the building block of the lowest-term criterion.
pub fn moduli_cross_ratio<C: Scalar>(setup: &PeriodSetup<C>, i: u32, j: u32) -> Result<C> {
    let f = |letter: i32| ProjValue::finite(setup.x(letter).clone());
    cross_ratio(
        &f(i as i32),
        &f(-(i as i32)),
        &f(j as i32),
        &f(-(j as i32)),
    )
}

/// The generators as Moebius maps over the series ring truncated at total
/// degree d (d >= 1: at degree 0 the multipliers vanish and the maps
/// degenerate to constants).
fn series_generators<C: Scalar>(
    setup: &PeriodSetup<C>,
    d: u32,
) -> Result<GeneratorSystem<MultiSeries<C>>> {
    debug_assert!(d >= 1);
    let g = setup.g;
    let mut gens = Vec::with_capacity(g);
    for k in 1..=g {
        let t_plus = MultiSeries::constant(g, d, setup.x(k as i32).clone());
        let t_minus = MultiSeries::constant(g, d, setup.x(-(k as i32)).clone());
        let y = MultiSeries::variable(g, d, k - 1, setup.unit.clone());
        gens.push(MoebiusMap::from_fixed_points(&t_plus, &t_minus, &y)?);
    }
    GeneratorSystem::new(gens)
}

/// Apply `phi_i` (i signed; negative means the inverse map) to a series
/// point, truncating at total degree d. At d = 0 the map collapses to the
/// constant `x_i`.
pub fn phi_apply<C: Scalar>(
    setup: &PeriodSetup<C>,
    i: i32,
    alpha: &MultiSeries<C>,
    d: u32,
) -> Result<MultiSeries<C>> {
    assert!(i != 0 && i.unsigned_abs() as usize <= setup.g);
    if d == 0 {
        return Ok(MultiSeries::constant(setup.g, 0, setup.x(i).clone()));
    }
    let sys = series_generators(setup, d)?;
    sys.map_for(i).apply_affine(alpha)
}

fn psi_with<C: Scalar>(
    setup: &PeriodSetup<C>,
    sys: &GeneratorSystem<MultiSeries<C>>,
    i: u32,
    j: u32,
    word: &[i32],
    d: u32,
) -> Result<MultiSeries<C>> {
    let g = setup.g;
    let constant = |letter: i32| MultiSeries::constant(g, d, setup.x(letter).clone());
    let m = sys.evaluate(word);
    let phi_j = m.apply_affine(&constant(j as i32))?;
    let phi_mj = m.apply_affine(&constant(-(j as i32)))?;
    let xi = constant(i as i32);
    let xmi = constant(-(i as i32));
    let num = xi.sub(&xmi).mul(&phi_j.sub(&phi_mj));
    let den = xi.sub(&phi_mj).mul(&xmi.sub(&phi_j));
    let one = MultiSeries::one(g, d, setup.unit.clone());
    Ok(one.add(&num.mul(&den.inverse()?)))
}

/// The factor `psi_ij(w)` for a nonidentity double-coset word, truncated at
/// total degree d. Lies in `1 + I^n` for a word of length n.
pub fn psi_factor<C: Scalar>(
    setup: &PeriodSetup<C>,
    i: u32,
    j: u32,
    word: &[i32],
    d: u32,
) -> Result<MultiSeries<C>> {
    assert!(!word.is_empty(), "identity word is handled by the caller");
    if d == 0 {
        return Ok(MultiSeries::one(setup.g, 0, setup.unit.clone()));
    }
    let sys = series_generators(setup, d)?;
    psi_with(setup, &sys, i, j, word, d)
}

fn entry_with<C: Scalar>(
    setup: &PeriodSetup<C>,
    sys: Option<&GeneratorSystem<MultiSeries<C>>>,
    i: u32,
    j: u32,
    d: u32,
) -> Result<MultiSeries<C>> {
    let g = setup.g;
    let mut acc = if i == j {
        if d == 0 {
            // p_ii = y_i * unit has no terms of degree 0
            return Ok(MultiSeries::zero(g, 0, setup.unit.clone()));
        }
        MultiSeries::variable(g, d, i as usize - 1, setup.unit.clone())
    } else {
        MultiSeries::constant(g, d, moduli_cross_ratio(setup, i, j)?)
    };
    if let Some(sys) = sys {
        for n in 1..=d as usize {
            for word in double_coset_reps(g as u32, n, i, j) {
                acc = acc.mul(&psi_with(setup, sys, i, j, &word, d)?);
            }
        }
    }
    Ok(acc)
}

/// A single period entry `p_ij` (1-based indices), computed directly from
/// its own double-coset product; `universal_periods` fills the matrix from
/// the upper triangle, so this is the independent route for symmetry
/// checks.
pub fn period_entry<C: Scalar>(
    setup: &PeriodSetup<C>,
    i: u32,
    j: u32,
    d: u32,
) -> Result<MultiSeries<C>> {
    assert!(i >= 1 && i as usize <= setup.g && j >= 1 && j as usize <= setup.g);
    let sys = if d >= 1 {
        Some(series_generators(setup, d)?)
    } else {
        None
    };
    entry_with(setup, sys.as_ref(), i, j, d)
}

/// The symmetric table of universal periods truncated at total y-degree D.
/// `p_ii = y_i * (unit)`, `p_ij = c_ij * (unit)` for i != j; entries are
/// exact truncated series over the setup's coefficient ring.
#[derive(Clone, Debug)]
pub struct UniversalPeriodTable<C: Scalar> {
    g: usize,
    d: u32,
    entries: Vec<MultiSeries<C>>,
}

impl<C: Scalar> UniversalPeriodTable<C> {
    pub fn g(&self) -> usize {
        self.g
    }

    /// Truncation order in the y variables.
    pub fn degree(&self) -> u32 {
        self.d
    }

    /// The entry `p_ij`, 1-based.
    pub fn entry(&self, i: u32, j: u32) -> &MultiSeries<C> {
        assert!(i >= 1 && i as usize <= self.g && j >= 1 && j as usize <= self.g);
        &self.entries[(i as usize - 1) * self.g + (j as usize - 1)]
    }
}

impl UniversalPeriodTable<PolyFraction> {
    /// Evaluate every coefficient at slot-indexed rational points.
    pub fn evaluate_at(&self, points: &[BigRational]) -> Result<UniversalPeriodTable<BigRational>> {
        if points.len() != 2 * self.g {
            return Err(Error::Precondition(format!(
                "expected {} evaluation points, got {}",
                2 * self.g,
                points.len()
            )));
        }
        let one = BigRational::from_integer(1.into());
        let entries = self
            .entries
            .iter()
            .map(|s| s.map_coeffs(one.clone(), |c| c.eval(points)))
            .collect::<Result<Vec<_>>>()?;
        Ok(UniversalPeriodTable {
            g: self.g,
            d: self.d,
            entries,
        })
    }

    /// The ring map `x_{-k} -> -x_k` applied to every coefficient.
    pub fn mirror_negate(&self) -> Result<UniversalPeriodTable<PolyFraction>> {
        let entries = self
            .entries
            .iter()
            .map(|s| {
                s.map_coeffs(PolyFraction::one(), |c| c.mirror_negate(self.g))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(UniversalPeriodTable {
            g: self.g,
            d: self.d,
            entries,
        })
    }
}

/// The full period table over words of length <= D: longer words contribute
/// `1 mod I^{D+1}` and are invisible at this truncation.
pub fn universal_periods<C: Scalar>(
    setup: &PeriodSetup<C>,
    d: u32,
) -> Result<UniversalPeriodTable<C>> {
    let g = setup.g;
    let sys = if d >= 1 {
        Some(series_generators(setup, d)?)
    } else {
        None
    };
    let mut entries = vec![MultiSeries::zero(g, d, setup.unit.clone()); g * g];
    for i in 1..=g as u32 {
        for j in i..=g as u32 {
            let e = entry_with(setup, sys.as_ref(), i, j, d)?;
            entries[(i as usize - 1) * g + (j as usize - 1)] = e.clone();
            entries[(j as usize - 1) * g + (i as usize - 1)] = e;
        }
    }
    Ok(UniversalPeriodTable { g, d, entries })
}

/// Universal periods with `x_{-k} = -x_k` substituted into every symbolic
/// coefficient (the literal ring-map route).
pub fn hyperelliptic_periods_symbolic(
    g: usize,
    d: u32,
) -> Result<UniversalPeriodTable<PolyFraction>> {
    universal_periods(&symbolic_setup(g), d)?.mirror_negate()
}

/// Evaluated hyperelliptic periods at the points `x_1, ..., x_g` (the
/// mirror values are filled in automatically).
pub fn hyperelliptic_periods_evaluated(
    g: usize,
    d: u32,
    points: &[BigRational],
) -> Result<UniversalPeriodTable<BigRational>> {
    universal_periods(&hyperelliptic_evaluated_setup(g, points)?, d)
}

/// Substitute a period table into a Fourier expansion:
/// `sum_T a_T prod_{i<j} p_ij^{2t_ij} prod_i p_ii^{t_ii}`, truncated at
/// total y-degree `d_sub`. Off-diagonal exponents may be negative (p_ij is
/// a unit); a support matrix with trace above `d_sub` contributes exactly
/// zero at this truncation (its diagonal powers alone reach y-valuation
/// `trace`) and is skipped. The table must be computed at least to `d_sub`.
pub fn substitute_periods<C: Scalar>(
    f: &FourierExpansion,
    table: &UniversalPeriodTable<C>,
    d_sub: u32,
    from_rational: impl Fn(&BigRational) -> C,
) -> Result<MultiSeries<C>> {
    if f.g() != table.g {
        return Err(Error::Precondition(format!(
            "expansion degree {} does not match table rank {}",
            f.g(),
            table.g
        )));
    }
    if table.d < d_sub {
        return Err(Error::Precondition(format!(
            "table truncated at degree {} cannot support substitution to degree {d_sub}",
            table.d
        )));
    }
    let g = table.g;
    let unit = table
        .entries
        .first()
        .map(|s| s.unit().clone())
        .unwrap_or_else(|| from_rational(&BigRational::from_integer(1.into())));
    let mut acc = MultiSeries::zero(g, d_sub, unit.clone());
    for (t, a) in f.terms() {
        if t.trace() > i64::from(d_sub) {
            continue;
        }
        let mut term = MultiSeries::one(g, d_sub, unit.clone());
        for i in 1..=g as u32 {
            let e = t.diag()[i as usize - 1];
            if e != 0 {
                term = term.mul(&table.entry(i, i).truncate(d_sub).pow(e)?);
            }
        }
        for i in 1..=g as u32 {
            for j in (i + 1)..=g as u32 {
                let e = t.off_entry(i as usize - 1, j as usize - 1);
                if e != 0 {
                    term = term.mul(&table.entry(i, j).truncate(d_sub).pow(e)?);
                }
            }
        }
        acc = acc.add(&term.scale(&from_rational(a)));
    }
    Ok(acc)
}

/// Result of the lowest-term criterion: the evaluated layer sum and its
/// exact zero test.
#[derive(Clone, Debug)]
pub struct LowestTerm<C> {
    pub value: C,
    pub is_zero: bool,
}

/// The minimal-layer sum `sum_{diag(T) = s} a_T prod_{i<j} c_ij^{2t_ij}`
/// over the coefficient ring of the setup. `s` must realize the minimal
/// trace of the support of F; the diagonal powers `y_i^{s_i}` are common to
/// the whole layer and factored out, so a vanishing sum means the lowest
/// y-degree of the substituted series cancels.
pub fn lowest_term_check<C: Scalar>(
    f: &FourierExpansion,
    s: &[i64],
    setup: &PeriodSetup<C>,
    from_rational: impl Fn(&BigRational) -> C,
) -> Result<LowestTerm<C>> {
    if f.g() != setup.g || s.len() != setup.g {
        return Err(Error::Precondition(
            "expansion, layer vector and setup must share one rank".into(),
        ));
    }
    let min_trace = f
        .terms()
        .map(|(t, _)| t.trace())
        .min()
        .ok_or_else(|| Error::Precondition("empty expansion has no minimal trace".into()))?;
    let layer_trace: i64 = s.iter().sum();
    if layer_trace != min_trace {
        return Err(Error::Precondition(format!(
            "layer trace {layer_trace} does not match the minimal support trace {min_trace}"
        )));
    }
    let g = setup.g;
    let mut value = setup.unit.zero_like();
    for (t, a) in f.terms() {
        if t.diag() != s {
            continue;
        }
        let mut term = from_rational(a);
        for i in 1..=g as u32 {
            for j in (i + 1)..=g as u32 {
                let e = t.off_entry(i as usize - 1, j as usize - 1);
                if e == 0 {
                    continue;
                }
                let c = moduli_cross_ratio(setup, i, j)?;
                let p = int_pow(&c, e)?;
                term = term.mul(&p);
            }
        }
        value = value.add(&term);
    }
    let is_zero = value.is_zero();
    Ok(LowestTerm { value, is_zero })
}

fn int_pow<C: Scalar>(base: &C, e: i64) -> Result<C> {
    let positive = if e >= 0 {
        base.clone()
    } else {
        base.try_inv().ok_or_else(|| {
            Error::NotInvertible("cross-ratio power with negative exponent".into())
        })?
    };
    let mut acc = base.one_like();
    for _ in 0..e.unsigned_abs() {
        acc = acc.mul(&positive);
    }
    Ok(acc)
}
