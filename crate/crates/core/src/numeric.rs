//! Floating-point Schottky groups: multiplicative period matrices by
//! truncated double-coset products, holomorphic differentials with contour
//! validation, disk-based convergence certificates, degeneration probes,
//! and limit-set sampling.
//!
//! A rank-g group is given by g loxodromic generators in fixed-point form
//! `(t_i, t_{-i}, s_i)` with `0 < |s_i| < 1`. The multiplicative periods
//! are
//!
//! ```text
//! p_ij = leading * prod_{w in Phi_ij, 1 <= |w| <= N} psi_ij(w),
//! psi_ij(w) = [t_i, t_{-i}; w(t_j), w(t_{-j})],
//! ```
//!
//! with leading factor `s_i` on the diagonal and the cross-ratio
//! `c_ij = [t_i, t_{-i}; t_j, t_{-j}]` off it; `Phi_ij` are the nontrivial
//! double-coset words (first letter not in `{+-i}`, last not in `{+-j}`).
//! The additive matrix is recovered per factor: `z_ij = (1/2 pi i)
//! (Log leading + sum_w Log psi_ij(w))` with the principal branch of each
//! log; every psi of a long word is near 1, so only the leading factor's
//! branch is a convention.
//!
//! Convergence is certified from a system of 2g disjoint closed disks via
//! `K_ij = (r_i^2 + r_j^2 - rho_ij^2)^2 / (4 r_i^2 r_j^2) - 1` and
//! `L_ij = 1 / (sqrt(1 + K_ij) + sqrt(K_ij))`: when the sum of the L over
//! ordered pairs of distinct disk letters is below 1, word products
//! converge geometrically with that ratio. Default disks are the isometric
//! circles, which for fixed-point form have the closed expressions
//! `D_{-i}: center (t_{-i} - s t_i)/(1 - s)`, `D_i: center
//! (t_i - s t_{-i})/(1 - s)`, both of radius
//! `sqrt|s| |t_i - t_{-i}| / |1 - s|`.
//!
//! Every floating sum and product here is accumulated sequentially in the
//! deterministic word-iterator order, so repeated runs are bit-identical.

use num_complex::Complex64;

use crate::moebius::{cross_ratio, MoebiusMap, ProjValue};
use crate::words::{coset_reps, double_coset_reps, reduced_words, GeneratorSystem};
use crate::{Error, Result};

/// A closed disk in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Disk { center, radius }
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        (z - self.center).norm() <= self.radius + slack
    }

    /// Strict disjointness of closed disks (tangency fails).
    pub fn disjoint_from(&self, other: &Disk) -> bool {
        (self.center - other.center).norm() > self.radius + other.radius
    }
}

/// A marked rank-g Schottky group over binary64 complex numbers.
#[derive(Clone, Debug)]
pub struct SchottkyGroupNumeric {
    g: usize,
    fixed: Vec<Complex64>,
    multipliers: Vec<Complex64>,
    circles: Vec<Disk>,
    circles_disjoint: bool,
    diameter: f64,
    sys: GeneratorSystem<Complex64>,
}

fn letter_slot(letter: i32) -> usize {
    crate::algebra::slot(letter)
}

fn validate_generators(data: &[(Complex64, Complex64, Complex64)]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Precondition("rank must be at least 1".into()));
    }
    let mut points = Vec::new();
    for (k, (tp, tm, s)) in data.iter().enumerate() {
        if s.norm() >= 1.0 {
            return Err(Error::Precondition(format!(
                "multiplier s_{} has |s| = {} >= 1",
                k + 1,
                s.norm()
            )));
        }
        if s.norm() == 0.0 {
            return Err(Error::Precondition(format!(
                "multiplier s_{} is zero; the generator degenerates",
                k + 1
            )));
        }
        points.push(*tp);
        points.push(*tm);
    }
    for a in 0..points.len() {
        for b in (a + 1)..points.len() {
            if points[a] == points[b] {
                return Err(Error::SingularConfiguration(format!(
                    "fixed points in slots {a} and {b} coincide"
                )));
            }
        }
    }
    Ok(())
}

fn isometric_circles(data: &[(Complex64, Complex64, Complex64)]) -> Vec<Disk> {
    let mut out = Vec::with_capacity(2 * data.len());
    let one = Complex64::new(1.0, 0.0);
    for (tp, tm, s) in data {
        let denom = one - s;
        let radius = s.norm().sqrt() * (tp - tm).norm() / denom.norm();
        out.push(Disk::new((tp - s * tm) / denom, radius));
        out.push(Disk::new((tm - s * tp) / denom, radius));
    }
    out
}

fn all_disjoint(circles: &[Disk]) -> bool {
    for a in 0..circles.len() {
        for b in (a + 1)..circles.len() {
            if !circles[a].disjoint_from(&circles[b]) {
                return false;
            }
        }
    }
    true
}

impl SchottkyGroupNumeric {
    /// Build from fixed-point data `(t_i, t_{-i}, s_i)`, computing the
    /// isometric circles. If those happen to overlap the group is still
    /// usable, but no convergence certificate will be issued.
    pub fn new(data: &[(Complex64, Complex64, Complex64)]) -> Result<Self> {
        let circles = isometric_circles(data);
        Self::build(data, circles, false)
    }

    /// Build with an explicit disk system `D_1, D_{-1}, D_2, ...` (slot
    /// order). The closed disks must be pairwise disjoint and each must
    /// contain its fixed point.
    pub fn with_circles(
        data: &[(Complex64, Complex64, Complex64)],
        circles: Vec<Disk>,
    ) -> Result<Self> {
        if circles.len() != 2 * data.len() {
            return Err(Error::Precondition(format!(
                "expected {} circles, got {}",
                2 * data.len(),
                circles.len()
            )));
        }
        Self::build(data, circles, true)
    }

    fn build(
        data: &[(Complex64, Complex64, Complex64)],
        circles: Vec<Disk>,
        strict: bool,
    ) -> Result<Self> {
        validate_generators(data)?;
        let mut fixed = Vec::with_capacity(2 * data.len());
        for (tp, tm, _) in data {
            fixed.push(*tp);
            fixed.push(*tm);
        }
        if strict {
            for (k, (tp, tm, _)) in data.iter().enumerate() {
                let dp = &circles[2 * k];
                let dm = &circles[2 * k + 1];
                if !dp.contains(*tp, 0.0) || !dm.contains(*tm, 0.0) {
                    return Err(Error::Precondition(format!(
                        "circle pair {} does not contain its fixed points",
                        k + 1
                    )));
                }
            }
            if !all_disjoint(&circles) {
                return Err(Error::DisjointnessViolation(
                    "supplied closed disks are not pairwise disjoint".into(),
                ));
            }
        }
        let circles_disjoint = all_disjoint(&circles);
        let mut diameter: f64 = 0.0;
        for a in 0..fixed.len() {
            for b in (a + 1)..fixed.len() {
                diameter = diameter.max((fixed[a] - fixed[b]).norm());
            }
        }
        let gens = data
            .iter()
            .map(|(tp, tm, s)| MoebiusMap::from_fixed_points(tp, tm, s))
            .collect::<Result<Vec<_>>>()?;
        let sys = GeneratorSystem::new(gens)?;
        Ok(SchottkyGroupNumeric {
            g: data.len(),
            fixed,
            multipliers: data.iter().map(|d| d.2).collect(),
            circles,
            circles_disjoint,
            diameter,
            sys,
        })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// The fixed point `t_letter`, letter in `{+-1, ..., +-g}`.
    pub fn fixed_point(&self, letter: i32) -> Complex64 {
        self.fixed[letter_slot(letter)]
    }

    pub fn multiplier(&self, i: u32) -> Complex64 {
        self.multipliers[i as usize - 1]
    }

    /// The disk attached to the letter: `D_i` absorbs `gamma_i`-images,
    /// `D_{-i}` is its paired source disk.
    pub fn circle(&self, letter: i32) -> &Disk {
        &self.circles[letter_slot(letter)]
    }

    pub fn circles_disjoint(&self) -> bool {
        self.circles_disjoint
    }

    /// Largest distance between marked fixed points; the scale reference
    /// for pole-exclusion thresholds.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Evaluate a reduced word to its Moebius map.
    pub fn evaluate_word(&self, word: &[i32]) -> MoebiusMap<Complex64> {
        self.sys.evaluate(word)
    }
}

/// Convergence certificate data for a disk system.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    /// `K[a][b]` over disk slots a != b (diagonal entries are NaN).
    pub k: Vec<Vec<f64>>,
    /// `L[a][b] = 1/(sqrt(1+K) + sqrt(K))`; NaN where K < 0 (overlap).
    pub l: Vec<Vec<f64>>,
    /// Sum of L over ordered pairs of distinct slots.
    pub sum_l: f64,
    pub certified: bool,
    pub diagnostic: Option<String>,
}

impl ConvergenceReport {
    /// Relative geometric tail factor for truncation at word length m:
    /// factors beyond length m are suppressed like `sum_l^m` (the absolute
    /// constant of the disk system is not estimated).
    pub fn tail_factor(&self, m: u32) -> f64 {
        self.sum_l.powi(m as i32)
    }
}

/// The K/L certificate for an arbitrary slot-ordered disk system. Errors
/// only on coincident centers; overlapping or tangent disks yield an
/// uncertified report with the offending pair in the diagnostic.
pub fn disk_certificate(circles: &[Disk]) -> Result<ConvergenceReport> {
    let n = circles.len();
    let mut k = vec![vec![f64::NAN; n]; n];
    let mut l = vec![vec![f64::NAN; n]; n];
    let mut sum_l = 0.0;
    let mut diagnostic = None;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let (ra, rb) = (circles[a].radius, circles[b].radius);
            let rho = (circles[a].center - circles[b].center).norm();
            if rho == 0.0 {
                return Err(Error::DisjointnessViolation(format!(
                    "disks {a} and {b} have coincident centers"
                )));
            }
            let t = (ra * ra + rb * rb - rho * rho) / (2.0 * ra * rb);
            let kk = t * t - 1.0;
            k[a][b] = kk;
            if kk >= 0.0 && rho > ra + rb {
                l[a][b] = 1.0 / ((1.0 + kk).sqrt() + kk.sqrt());
            } else if kk >= 0.0 {
                // tangent or nested: the formula still evaluates but the
                // disk system is not a Schottky system
                l[a][b] = 1.0 / ((1.0 + kk).sqrt() + kk.sqrt());
                diagnostic.get_or_insert_with(|| {
                    format!("disks {a} and {b} are not strictly disjoint")
                });
            } else {
                diagnostic
                    .get_or_insert_with(|| format!("disks {a} and {b} overlap (K < 0)"));
            }
            sum_l += l[a][b];
        }
    }
    let disjoint = all_disjoint(circles);
    if !disjoint {
        diagnostic.get_or_insert_with(|| "disk system is not pairwise disjoint".into());
    }
    let certified = disjoint && sum_l.is_finite() && sum_l < 1.0;
    Ok(ConvergenceReport {
        k,
        l,
        sum_l,
        certified,
        diagnostic,
    })
}

/// Certificate for the group's stored disk system.
pub fn convergence_certificate(group: &SchottkyGroupNumeric) -> Result<ConvergenceReport> {
    let mut report = disk_certificate(&group.circles)?;
    if !group.circles_disjoint && report.diagnostic.is_none() {
        report.diagnostic = Some("disk system is not pairwise disjoint".into());
    }
    report.certified = report.certified && group.circles_disjoint;
    Ok(report)
}

/// A truncated multiplicative period matrix with its additive logarithm
/// and the error accounting of the truncation.
#[derive(Clone, Debug)]
pub struct PeriodMatrixNumeric {
    pub g: usize,
    /// Word-length truncation of the double-coset products.
    pub n: usize,
    /// Multiplicative periods p_ij.
    pub p: Vec<Vec<Complex64>>,
    /// Additive periods: z_ij = (1/2 pi i)(Log leading + sum Log psi).
    pub z: Vec<Vec<Complex64>>,
    /// Relative bound on the discarded tail of the product, from the
    /// certificate ratio: e_N * q/(1-q) exponentiated; NaN when no
    /// certificate exists.
    pub tail_bound: Vec<Vec<f64>>,
    /// Relative bound on |p_ij / leading_ij - 1| including both the
    /// computed factors and the estimated tail.
    pub deviation_bound: Vec<Vec<f64>>,
    /// Certificate ratio sum_l (NaN when uncertified).
    pub contraction_ratio: f64,
    pub certified: bool,
}

impl PeriodMatrixNumeric {
    /// Largest |p_ij - p_ji|; both triangles are computed independently.
    pub fn symmetry_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.g {
            for j in 0..self.g {
                worst = worst.max((self.p[i][j] - self.p[j][i]).norm());
            }
        }
        worst
    }

    /// Leading principal minors of the symmetrized Im Z.
    pub fn im_z_minors(&self) -> Vec<f64> {
        let g = self.g;
        let mut m = vec![vec![0.0f64; g]; g];
        for i in 0..g {
            for j in 0..g {
                m[i][j] = 0.5 * (self.z[i][j].im + self.z[j][i].im);
            }
        }
        (1..=g).map(|k| real_det(&m, k)).collect()
    }

    pub fn im_z_positive_definite(&self) -> bool {
        self.im_z_minors().iter().all(|d| *d > 0.0)
    }
}

/// Determinant of the leading k x k block, by Gaussian elimination with
/// partial pivoting (g stays small here).
fn real_det(m: &[Vec<f64>], k: usize) -> f64 {
    let mut a: Vec<Vec<f64>> = (0..k).map(|i| m[i][..k].to_vec()).collect();
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in (col + 1)..k {
            let f = a[row][col] / a[col][col];
            for c in col..k {
                let upper = a[col][c];
                a[row][c] -= f * upper;
            }
        }
    }
    det
}

fn psi_numeric(
    group: &SchottkyGroupNumeric,
    i: u32,
    j: u32,
    word: &[i32],
) -> Result<Complex64> {
    let m = group.sys.evaluate(word);
    let tj = ProjValue::finite(group.fixed_point(j as i32));
    let tmj = ProjValue::finite(group.fixed_point(-(j as i32)));
    let a = ProjValue::finite(group.fixed_point(i as i32));
    let b = ProjValue::finite(group.fixed_point(-(i as i32)));
    cross_ratio(&a, &b, &m.apply(&tj), &m.apply(&tmj)).map_err(|e| match e {
        Error::DegenerateCrossRatio(msg) => Error::SingularConfiguration(format!(
            "orbit cross-ratio degenerated for word {word:?}: {msg}"
        )),
        other => other,
    })
}

/// The truncated period matrix over words of length at most N. Both
/// triangles are computed independently so the symmetry deviation is an
/// honest consistency measure.
pub fn period_matrix(group: &SchottkyGroupNumeric, n: usize) -> Result<PeriodMatrixNumeric> {
    let g = group.g;
    let report = convergence_certificate(group)?;
    let q = if report.certified {
        report.sum_l
    } else {
        f64::NAN
    };
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let mut p = vec![vec![Complex64::new(0.0, 0.0); g]; g];
    let mut z = vec![vec![Complex64::new(0.0, 0.0); g]; g];
    let mut tail = vec![vec![0.0f64; g]; g];
    let mut dev = vec![vec![0.0f64; g]; g];
    for i in 1..=g as u32 {
        for j in 1..=g as u32 {
            let leading = if i == j {
                group.multiplier(i)
            } else {
                let f = |letter: i32| ProjValue::finite(group.fixed_point(letter));
                cross_ratio(
                    &f(i as i32),
                    &f(-(i as i32)),
                    &f(j as i32),
                    &f(-(j as i32)),
                )?
            };
            let mut prod = leading;
            let mut log_sum = leading.ln();
            let mut computed_sum = 0.0f64;
            let mut last_layer = 0.0f64;
            for len in 1..=n {
                last_layer = 0.0;
                for word in double_coset_reps(g as u32, len, i, j) {
                    let psi = psi_numeric(group, i, j, &word)?;
                    prod *= psi;
                    log_sum += psi.ln();
                    last_layer += (psi - Complex64::new(1.0, 0.0)).norm();
                }
                computed_sum += last_layer;
            }
            let tail_sum = if n == 0 {
                f64::NAN
            } else {
                last_layer * q / (1.0 - q)
            };
            let (ii, jj) = (i as usize - 1, j as usize - 1);
            p[ii][jj] = prod;
            z[ii][jj] = log_sum / two_pi_i;
            tail[ii][jj] = tail_sum.exp_m1();
            dev[ii][jj] = (computed_sum + tail_sum.max(0.0)).exp_m1();
            if tail_sum.is_nan() {
                dev[ii][jj] = f64::NAN;
            }
        }
    }
    Ok(PeriodMatrixNumeric {
        g,
        n,
        p,
        z,
        tail_bound: tail,
        deviation_bound: dev,
        contraction_ratio: q,
        certified: report.certified,
    })
}

/// Evaluate the coefficient of the normalized differential `omega_i` at z,
/// truncating the coset sum at word length N, with an explicit
/// pole-exclusion radius.
pub fn differential_eval_with_exclusion(
    group: &SchottkyGroupNumeric,
    i: u32,
    z: Complex64,
    n: usize,
    exclusion: f64,
) -> Result<Complex64> {
    assert!(i >= 1 && i as usize <= group.g);
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let mut sum = Complex64::new(0.0, 0.0);
    let ti = ProjValue::finite(group.fixed_point(i as i32));
    let tmi = ProjValue::finite(group.fixed_point(-(i as i32)));
    let mut add_coset = |m: &MoebiusMap<Complex64>| -> Result<()> {
        for (sign, t) in [(1.0, &ti), (-1.0, &tmi)] {
            let orbit = m.apply(t);
            if orbit.is_infinity() {
                continue; // 1/(z - inf) = 0 contributes nothing
            }
            let u = orbit.to_affine()?;
            let d = z - u;
            if d.norm() < exclusion {
                return Err(Error::PoleProximity {
                    re: u.re,
                    im: u.im,
                    eps: exclusion,
                });
            }
            sum += sign / d;
        }
        Ok(())
    };
    add_coset(&MoebiusMap::identity(&Complex64::new(1.0, 0.0)))?;
    for len in 1..=n {
        for word in coset_reps(group.g as u32, len, i) {
            add_coset(&group.sys.evaluate(&word))?;
        }
    }
    Ok(sum / two_pi_i)
}

/// `omega_i(z)` with the default exclusion radius `1e-8 * diameter`.
pub fn differential_eval(
    group: &SchottkyGroupNumeric,
    i: u32,
    z: Complex64,
    n: usize,
) -> Result<Complex64> {
    differential_eval_with_exclusion(group, i, z, n, 1e-8 * group.diameter)
}

/// Trapezoidal contour integral of `omega_i` around the circle of the
/// given letter, positively oriented; nodes is the quadrature count. The
/// integrand is analytic and periodic on the circle, so the rule converges
/// spectrally.
pub fn contour_integral(
    group: &SchottkyGroupNumeric,
    i: u32,
    circle_letter: i32,
    n: usize,
    nodes: usize,
) -> Result<Complex64> {
    assert!(nodes >= 8);
    let disk = *group.circle(circle_letter);
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * m as f64 / nodes as f64;
        let dir = Complex64::new(theta.cos(), theta.sin());
        let zp = disk.center + disk.radius * dir;
        sum += differential_eval(group, i, zp, n)? * dir;
    }
    let scale = Complex64::new(0.0, 2.0 * std::f64::consts::PI * disk.radius / nodes as f64);
    Ok(scale * sum)
}

/// One row of a degeneration probe: the full period matrix at a pinched
/// multiplier value, and the ratio p_kk / s_k.
#[derive(Clone, Debug)]
pub struct DegenerationRow {
    pub s: f64,
    pub p: Vec<Vec<Complex64>>,
    pub ratio_kk: Complex64,
}

/// Degeneration table: rows for each probed multiplier, and the period
/// matrix of the rank-(g-1) group with generator k removed (surviving
/// generator indices keep their relative order).
#[derive(Clone, Debug)]
pub struct DegenerationTable {
    pub k: u32,
    pub rows: Vec<DegenerationRow>,
    pub limit: Vec<Vec<Complex64>>,
}

/// Replace `s_k` by each probe value (real, decreasing, in (0,1)) and
/// recompute the period matrix at word length n; also computes the
/// rank-(g-1) limit group's periods for comparison.
pub fn degeneration_probe(
    group: &SchottkyGroupNumeric,
    k: u32,
    s_values: &[f64],
    n: usize,
) -> Result<DegenerationTable> {
    if k == 0 || k as usize > group.g {
        return Err(Error::Precondition(format!("no generator {k}")));
    }
    if s_values.is_empty() {
        return Err(Error::Precondition("no probe values supplied".into()));
    }
    for w in s_values.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::Precondition(
                "probe multipliers must be strictly decreasing".into(),
            ));
        }
    }
    if s_values[0] >= 1.0 || *s_values.last().unwrap() <= 0.0 {
        return Err(Error::Precondition(
            "probe multipliers must lie in (0, 1)".into(),
        ));
    }
    let data: Vec<(Complex64, Complex64, Complex64)> = (1..=group.g as u32)
        .map(|i| {
            (
                group.fixed_point(i as i32),
                group.fixed_point(-(i as i32)),
                group.multiplier(i),
            )
        })
        .collect();
    let mut rows = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let mut probe = data.clone();
        probe[k as usize - 1].2 = Complex64::new(s, 0.0);
        let pm = period_matrix(&SchottkyGroupNumeric::new(&probe)?, n)?;
        let ratio = pm.p[k as usize - 1][k as usize - 1] / s;
        rows.push(DegenerationRow {
            s,
            p: pm.p,
            ratio_kk: ratio,
        });
    }
    let survivors: Vec<_> = data
        .iter()
        .enumerate()
        .filter(|(idx, _)| *idx != k as usize - 1)
        .map(|(_, d)| *d)
        .collect();
    let limit = if survivors.is_empty() {
        Vec::new()
    } else {
        period_matrix(&SchottkyGroupNumeric::new(&survivors)?, n)?.p
    };
    Ok(DegenerationTable { k, rows, limit })
}

/// Sample the limit set: images of every fixed point under every reduced
/// word of exactly the given length, in deterministic iterator order.
pub fn limit_set_sample(group: &SchottkyGroupNumeric, depth: usize) -> Result<Vec<Complex64>> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    let g = group.g as u32;
    let two_g = 2.0 * group.g as f64;
    let estimate = two_g * two_g * (two_g - 1.0).powi(depth as i32 - 1);
    if estimate > 5_000_000.0 {
        return Err(Error::ResourceGuard(format!(
            "limit-set sample of about {estimate:.1e} points; lower the depth"
        )));
    }
    let mut out = Vec::new();
    for word in reduced_words(g, depth) {
        let m = group.sys.evaluate(&word);
        for letter in 1..=g as i32 {
            for l in [letter, -letter] {
                let v = m.apply(&ProjValue::finite(group.fixed_point(l)));
                if !v.is_infinity() {
                    out.push(v.to_affine()?);
                }
            }
        }
    }
    Ok(out)
}
