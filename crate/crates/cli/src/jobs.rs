//! One handler per subcommand. Every JSON document carries the same
//! skeleton: `schema` (fixed at "1"), the subcommand name, the echoed
//! inputs, the results, and a metadata object holding whatever truncation
//! orders and certificates the computation reported. Handlers return the
//! document; exit-code mapping happens in main.

use std::path::Path;

use anyhow::Result;
use clap::ValueEnum;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use schottky_core::algebra::textform;
use schottky_core::numeric::{
    contour_integral, convergence_certificate, limit_set_sample, period_matrix,
};
use schottky_core::qforms;
use schottky_core::siegel::{self, Lattice};
use schottky_core::universal::{
    self, evaluated_setup, hyperelliptic_evaluated_setup, substitute_periods, universal_periods,
    PeriodSetup,
};
use schottky_core::Error;

use crate::io;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Symbolic,
    Evaluated,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Symbolic => "symbolic",
            Mode::Evaluated => "evaluated",
        }
    }
}

fn document(command: &str, inputs: Value, results: Value, metadata: Value) -> Value {
    json!({
        "schema": "1",
        "command": command,
        "inputs": inputs,
        "results": results,
        "metadata": metadata,
    })
}

pub fn tate_series(order: i64) -> Result<Value> {
    let a4 = qforms::tate_a4(order);
    let a6 = qforms::tate_a6(order);
    Ok(document(
        "tate-series",
        json!({ "order": order }),
        json!({ "a4": io::qseries_json(&a4), "a6": io::qseries_json(&a6) }),
        json!({ "integral": a4.all_integer() && a6.all_integer() }),
    ))
}

pub fn tate_verify(order: u32) -> Result<Value> {
    let residual = qforms::tate_equation_residual(order);
    Ok(document(
        "tate-verify",
        json!({ "order": order }),
        json!({
            "residual_terms": residual.term_count(),
            "pass": residual.is_zero(),
        }),
        json!({ "note": "residual of Y^2 + XY - X^3 - a4 X - a6 at the Tate parametrization, coefficients exact rational functions of u" }),
    ))
}

pub fn eisenstein(weight: u32, order: i64) -> Result<Value> {
    let series = qforms::eisenstein(weight, order)?;
    Ok(document(
        "eisenstein",
        json!({ "weight": weight, "order": order }),
        json!({ "series": io::qseries_json(&series) }),
        json!({ "normalization": "constant term 1" }),
    ))
}

pub fn j_invariant(order: i64) -> Result<Value> {
    // two orders of working precision feed the simple zero of the
    // denominator at q = 0
    let series = qforms::j_series(order + 2)?.scale(&BigRational::from_integer(1728.into()));
    Ok(document(
        "j-invariant",
        json!({ "order": order }),
        json!({ "series": io::qseries_json(&series) }),
        json!({ "normalization": "1728 j = q^-1 + 744 + 196884 q + ..." }),
    ))
}

pub fn identities(n_max: u64, p_max: u64) -> Result<Value> {
    let sigma7_pass = qforms::sigma7_residual(n_max as i64).is_zero();

    let theta4 = qforms::theta_pow4(n_max as i64);
    let mut squares_pass = true;
    for n in 1..=n_max {
        let closed = qforms::four_squares_closed_form(n);
        squares_pass &= theta4.coeff(n as i64)
            == BigRational::from_integer(closed.clone())
            && closed == BigInt::from(qforms::four_squares_direct_count(n));
    }

    let mut serre_pass = true;
    let mut primes = 0usize;
    for p in qforms::primes_up_to(p_max) {
        if p == 23 {
            continue;
        }
        serre_pass &= qforms::serre_form_coeff(p) == qforms::serre_predicted_coeff(p);
        primes += 1;
    }

    Ok(document(
        "identities",
        json!({ "n_max": n_max, "p_max": p_max }),
        json!({ "checks": [
            { "name": "sigma7-convolution", "n_max": n_max, "pass": sigma7_pass },
            { "name": "four-squares", "n_max": n_max, "pass": squares_pass },
            { "name": "serre-trichotomy", "n_max": p_max, "pass": serre_pass },
        ]}),
        json!({ "primes_checked": primes, "pass": sigma7_pass && squares_pass && serre_pass }),
    ))
}

pub fn theta_product(g: usize, max_trace: i64) -> Result<Value> {
    let f = siegel::theta_product(g, max_trace)?;
    let factors = siegel::even_characteristics(g).len();
    Ok(document(
        "theta-product",
        json!({ "g": g, "max_trace": max_trace }),
        json!({ "expansion": io::expansion_json(&f) }),
        json!({
            "even_characteristics": factors,
            "weight": factors as u64 / 2,
            "sign": siegel::even_char_sign(g),
        }),
    ))
}

pub fn lattice_theta(dim: usize, copies: usize, g: usize, max_trace: i64) -> Result<Value> {
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::Precondition(format!(
            "half-integral lattice dimension must be positive and even, got {dim}"
        ))
        .into());
    }
    if copies == 0 {
        return Err(Error::Precondition("need at least one lattice copy".into()).into());
    }
    let mut lattice = Lattice::half_int(dim);
    for _ in 1..copies {
        lattice = Lattice::direct_sum(lattice, Lattice::half_int(dim));
    }
    let f = siegel::lattice_theta(&lattice, g, max_trace);
    Ok(document(
        "lattice-theta",
        json!({ "dim": dim, "copies": copies, "g": g, "max_trace": max_trace }),
        json!({ "expansion": io::expansion_json(&f) }),
        json!({ "total_dimension": dim * copies }),
    ))
}

pub fn schottky_j(max_trace: i64, allow_large: bool) -> Result<Value> {
    let j = siegel::schottky_j(max_trace, allow_large)?;
    let scaled = j.scale(&BigRational::new(315.into(), 4.into()));
    let integral = scaled
        .terms()
        .all(|(_, a)| a.denom() == &BigInt::from(1));
    Ok(document(
        "schottky-j",
        json!({ "max_trace": max_trace, "allow_large": allow_large }),
        json!({
            "expansion": io::expansion_json(&j),
            "integral_after_scaling_by_315_over_4": integral,
        }),
        json!({ "definition": "(4/315)(theta(L8+L8, degree 4) - theta(L16, degree 4))" }),
    ))
}

pub fn boundary_restrict(form: &Path) -> Result<Value> {
    let f = io::load_expansion(form)?;
    let restricted = siegel::boundary_restrict(&f)?;
    Ok(document(
        "boundary-restrict",
        json!({ "form": form.display().to_string(), "input_g": f.g() }),
        json!({ "expansion": io::expansion_json(&restricted) }),
        json!({ "output_g": restricted.g(), "rule": "keep terms with t_gg = 0; positive semidefiniteness forces t_ig = 0" }),
    ))
}

pub fn periods_numeric(group_path: &Path, n: usize) -> Result<Value> {
    let (spec, group) = io::load_group(group_path)?;
    let pm = period_matrix(&group, n)?;
    Ok(document(
        "periods-numeric",
        json!({ "group": spec, "n": n }),
        json!({
            "p": io::complex_matrix_json(&pm.p),
            "z": io::complex_matrix_json(&pm.z),
            "tail_bound": io::float_matrix_json(&pm.tail_bound),
            "deviation_bound": io::float_matrix_json(&pm.deviation_bound),
            "symmetry_deviation": io::float_json(pm.symmetry_deviation()),
            "im_z_minors": Value::Array(pm.im_z_minors().into_iter().map(io::float_json).collect()),
            "im_z_positive_definite": pm.im_z_positive_definite(),
        }),
        json!({
            "n": pm.n,
            "certified": pm.certified,
            "contraction_ratio": io::float_json(pm.contraction_ratio),
        }),
    ))
}

pub fn convergence_cert(group_path: &Path) -> Result<Value> {
    let (spec, group) = io::load_group(group_path)?;
    let report = convergence_certificate(&group)?;
    Ok(document(
        "convergence-cert",
        json!({ "group": spec }),
        json!({
            "k": io::float_matrix_json(&report.k),
            "l": io::float_matrix_json(&report.l),
            "sum_l": io::float_json(report.sum_l),
            "certified": report.certified,
            "diagnostic": report.diagnostic,
        }),
        json!({ "criterion": "strictly disjoint isometric circles and sum of L over ordered pairs below 1" }),
    ))
}

pub fn differentials_check(group_path: &Path, n: usize, nodes: usize) -> Result<Value> {
    let (spec, group) = io::load_group(group_path)?;
    let g = group.g();
    let mut rows = Vec::new();
    let mut max_error: f64 = 0.0;
    for i in 1..=g as u32 {
        for letter in (1..=g as i32).flat_map(|j| [j, -j]) {
            let value = contour_integral(&group, i, letter, n, nodes)?;
            let expected = if letter == i as i32 {
                1.0
            } else if letter == -(i as i32) {
                -1.0
            } else {
                0.0
            };
            let error = (value - expected).norm();
            max_error = max_error.max(error);
            rows.push(json!({
                "differential": i,
                "circle": letter,
                "value": io::complex_json(value),
                "expected": expected,
                "abs_error": io::float_json(error),
            }));
        }
    }
    Ok(document(
        "differentials-check",
        json!({ "group": spec, "n": n, "nodes": nodes }),
        json!({
            "integrals": rows,
            "max_abs_error": io::float_json(max_error),
        }),
        json!({ "expected": "(1/2 pi i) contour integral of w_i over the circle of letter j is +1 at j = i, -1 at j = -i, 0 otherwise" }),
    ))
}

pub fn limit_set(group_path: &Path, depth: usize) -> Result<String> {
    let (_, group) = io::load_group(group_path)?;
    let points = limit_set_sample(&group, depth)?;
    let mut out = String::from("re,im\n");
    for z in points {
        out.push_str(&format!("{},{}\n", z.re, z.im));
    }
    Ok(out)
}

fn echo_points(points: &Option<Vec<BigRational>>) -> Value {
    match points {
        Some(pts) => io::rationals_json(pts),
        None => Value::Null,
    }
}

/// Shared engine for periods-universal and periods-hyperelliptic: the
/// symbolic coefficient ring has no polynomial GCD, so symbolic tables
/// beyond degree 1 are guarded behind --allow-large.
fn periods_table(
    command: &str,
    g: usize,
    degree: u32,
    mode: Mode,
    points: Option<&str>,
    allow_large: bool,
    hyperelliptic: bool,
) -> Result<Value> {
    if mode == Mode::Symbolic && degree > 1 && !allow_large {
        return Err(Error::ResourceGuard(format!(
            "symbolic tables above degree 1 grow without polynomial GCD; degree {degree} needs --allow-large"
        ))
        .into());
    }
    let per_set = if hyperelliptic { g } else { 2 * g };
    let parsed: Option<Vec<BigRational>> = match (mode, points) {
        (Mode::Evaluated, Some(p)) => {
            let pts = io::parse_rational_list(p)?;
            if pts.len() != per_set {
                return Err(Error::Parse(format!(
                    "evaluated mode at rank {g} needs exactly {per_set} points, got {}",
                    pts.len()
                ))
                .into());
            }
            Some(pts)
        }
        (Mode::Evaluated, None) => {
            return Err(Error::Parse("evaluated mode needs --points".into()).into());
        }
        (Mode::Symbolic, _) => None,
    };
    let (table_value, note) = match (mode, hyperelliptic) {
        (Mode::Symbolic, false) => {
            let table = universal_periods(&universal::symbolic_setup(g), degree)?;
            (
                io::table_json(&table, io::series_polyfrac_json),
                "coefficients are fractions of integer polynomials in x_1, x_-1, ..., x_-g",
            )
        }
        (Mode::Symbolic, true) => {
            let table = universal::hyperelliptic_periods_symbolic(g, degree)?;
            (
                io::table_json(&table, io::series_polyfrac_json),
                "x_-k replaced by -x_k; coefficients live in the g-variable subring",
            )
        }
        (Mode::Evaluated, false) => {
            let pts = parsed.as_ref().unwrap();
            let table = universal_periods(&evaluated_setup(g, pts)?, degree)?;
            (
                io::table_json(&table, io::series_rational_json),
                "coefficients are exact rationals at the given points",
            )
        }
        (Mode::Evaluated, true) => {
            let pts = parsed.as_ref().unwrap();
            let table = universal::hyperelliptic_periods_evaluated(g, degree, pts)?;
            (
                io::table_json(&table, io::series_rational_json),
                "slots filled as (p_1, -p_1, ..., p_g, -p_g)",
            )
        }
    };
    Ok(document(
        command,
        json!({
            "g": g,
            "degree": degree,
            "mode": mode.name(),
            "points": echo_points(&parsed),
        }),
        json!({ "table": table_value }),
        json!({ "note": note }),
    ))
}

pub fn periods_universal(
    g: usize,
    degree: u32,
    mode: Mode,
    points: Option<&str>,
    allow_large: bool,
) -> Result<Value> {
    periods_table("periods-universal", g, degree, mode, points, allow_large, false)
}

pub fn periods_hyperelliptic(
    g: usize,
    degree: u32,
    mode: Mode,
    points: Option<&str>,
    allow_large: bool,
) -> Result<Value> {
    periods_table(
        "periods-hyperelliptic",
        g,
        degree,
        mode,
        points,
        allow_large,
        true,
    )
}

fn evaluated_setup_for(
    g: usize,
    hyperelliptic: bool,
    points: &[BigRational],
) -> Result<PeriodSetup<BigRational>> {
    if hyperelliptic {
        Ok(hyperelliptic_evaluated_setup(g, points)?)
    } else {
        Ok(evaluated_setup(g, points)?)
    }
}

pub fn schottky_check(
    form: &Path,
    degree: u32,
    hyperelliptic: bool,
    points: &str,
    allow_large: bool,
) -> Result<Value> {
    let f = io::load_expansion(form)?;
    let g = f.g();
    if degree > 4 && !allow_large {
        return Err(Error::ResourceGuard(format!(
            "substitution tables above degree 4 enumerate tens of thousands of words; degree {degree} needs --allow-large"
        ))
        .into());
    }
    let per_set = if hyperelliptic { g } else { 2 * g };
    let sets = io::resolve_point_sets(points, per_set)?;
    let skipped = f.terms().filter(|(t, _)| t.trace() > degree as i64).count();
    let mut verdicts = Vec::new();
    let mut all_zero = true;
    for set in &sets {
        let setup = evaluated_setup_for(g, hyperelliptic, set)?;
        let table = universal_periods(&setup, degree)?;
        let sub = substitute_periods(&f, &table, degree, Clone::clone)?;
        all_zero &= sub.is_zero();
        verdicts.push(json!({
            "points": io::rationals_json(set),
            "zero": sub.is_zero(),
            "series": io::series_rational_json(&sub),
        }));
    }
    Ok(document(
        "schottky-check",
        json!({
            "form": form.display().to_string(),
            "degree": degree,
            "hyperelliptic": hyperelliptic,
            "points": points,
        }),
        json!({ "verdicts": verdicts, "all_zero": all_zero }),
        json!({
            "g": g,
            "form_terms": f.terms().count(),
            "terms_above_degree": skipped,
            "note": "terms of trace above the substitution degree contribute nothing at this truncation",
        }),
    ))
}

pub fn lowest_term(
    form: &Path,
    layer: &str,
    mode: Mode,
    hyperelliptic: bool,
    points: &str,
) -> Result<Value> {
    let f = io::load_expansion(form)?;
    let g = f.g();
    let s = io::parse_layer(layer)?;
    let results = match mode {
        Mode::Symbolic => {
            let setup = if hyperelliptic {
                universal::hyperelliptic_symbolic_setup(g)
            } else {
                universal::symbolic_setup(g)
            };
            let report = universal::lowest_term_check(&f, &s, &setup, |r| {
                schottky_core::algebra::PolyFraction::from_rational(r)
            })?;
            json!({ "evaluations": [{
                "points": Value::Null,
                "value": textform::format_polyfrac(&report.value),
                "zero": report.is_zero,
            }], "all_zero": report.is_zero })
        }
        Mode::Evaluated => {
            let per_set = if hyperelliptic { g } else { 2 * g };
            let sets = io::resolve_point_sets(points, per_set)?;
            let mut rows = Vec::new();
            let mut all_zero = true;
            for set in &sets {
                let setup = evaluated_setup_for(g, hyperelliptic, set)?;
                let report = universal::lowest_term_check(&f, &s, &setup, Clone::clone)?;
                all_zero &= report.is_zero;
                rows.push(json!({
                    "points": io::rationals_json(set),
                    "value": textform::format_rational(&report.value),
                    "zero": report.is_zero,
                }));
            }
            json!({ "evaluations": rows, "all_zero": all_zero })
        }
    };
    Ok(document(
        "lowest-term",
        json!({
            "form": form.display().to_string(),
            "layer": layer,
            "mode": mode.name(),
            "hyperelliptic": hyperelliptic,
            "points": if mode == Mode::Evaluated { Value::String(points.into()) } else { Value::Null },
        }),
        results,
        json!({
            "g": g,
            "rule": "sum of a_T prod c_ij^(2 t_ij) over the terms with diagonal equal to the layer",
        }),
    ))
}
