//! JSON and text conversions for the command-line surface.
//!
//! Conventions, fixed across every subcommand: rationals travel as exact
//! `"num/den"` strings, complex numbers as `[re, im]` pairs, Fourier
//! expansions as `{g, max_trace, terms: [{T, a}]}` where `T` is the full
//! symmetric integer matrix (diagonal `t_ii`, off-diagonal slots holding
//! the stored doubled exponents `2 t_ij`). Every value emitted here parses
//! back to the same internal value, and iteration orders are the ordered-map
//! orders of the underlying types, so reruns are byte-identical.

use std::fs;
use std::path::Path;

use anyhow::Result;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use schottky_core::algebra::{textform, MultiSeries, PolyFraction, QSeries};
use schottky_core::numeric::SchottkyGroupNumeric;
use schottky_core::siegel::{ExpMat, FourierExpansion};
use schottky_core::universal::UniversalPeriodTable;
use schottky_core::Error;

/// One generator of a numeric group: fixed points and multiplier as
/// `[re, im]` pairs.
#[derive(Serialize, Deserialize, Clone, Copy)]
pub struct GeneratorSpec {
    pub t_plus: [f64; 2],
    pub t_minus: [f64; 2],
    pub s: [f64; 2],
}

#[derive(Serialize, Deserialize, Clone)]
pub struct GroupSpec {
    pub generators: Vec<GeneratorSpec>,
}

/// Read a group configuration file and build the validated numeric group.
/// File problems surface as parse errors (exit 2), geometric problems as
/// the core's configuration errors (exit 3).
pub fn load_group(path: &Path) -> Result<(GroupSpec, SchottkyGroupNumeric)> {
    let text = fs::read_to_string(path)?;
    let spec: GroupSpec = serde_json::from_str(&text)?;
    for gen in &spec.generators {
        for v in [gen.t_plus, gen.t_minus, gen.s] {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(Error::Parse(format!(
                    "non-finite value in group file {}",
                    path.display()
                ))
                .into());
            }
        }
    }
    let data: Vec<(Complex64, Complex64, Complex64)> = spec
        .generators
        .iter()
        .map(|gen| {
            (
                Complex64::new(gen.t_plus[0], gen.t_plus[1]),
                Complex64::new(gen.t_minus[0], gen.t_minus[1]),
                Complex64::new(gen.s[0], gen.s[1]),
            )
        })
        .collect();
    let group = SchottkyGroupNumeric::new(&data)?;
    Ok((spec, group))
}

pub fn complex_json(z: Complex64) -> Value {
    json!([float_json(z.re), float_json(z.im)])
}

/// NaN has no JSON number; it is emitted as null (uncertified tail bounds).
pub fn float_json(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn complex_matrix_json(m: &[Vec<Complex64>]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(|&z| complex_json(z)).collect()))
            .collect(),
    )
}

pub fn float_matrix_json(m: &[Vec<f64>]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(|&x| float_json(x)).collect()))
            .collect(),
    )
}

/// `{"terms": [[exponent, "num/den"], ...]}` in increasing exponent order.
pub fn qseries_json(s: &QSeries) -> Value {
    let terms: Vec<Value> = s
        .iter_nonzero()
        .map(|(k, c)| json!([k, textform::format_rational(c)]))
        .collect();
    json!({ "order": s.order(), "terms": terms })
}

pub fn expansion_json(f: &FourierExpansion) -> Value {
    let g = f.g();
    let terms: Vec<Value> = f
        .terms()
        .map(|(t, a)| {
            let mut mat = vec![vec![0i64; g]; g];
            for (i, &d) in t.diag().iter().enumerate() {
                mat[i][i] = d;
            }
            for i in 0..g {
                for j in (i + 1)..g {
                    let e = t.off_entry(i, j);
                    mat[i][j] = e;
                    mat[j][i] = e;
                }
            }
            json!({ "T": mat, "a": textform::format_rational(a) })
        })
        .collect();
    json!({ "g": g, "max_trace": f.max_trace(), "terms": terms })
}

/// Accepts either a bare expansion object or a whole emitted document
/// (in which case `results.expansion` is taken), so one subcommand's
/// output file feeds the next subcommand unedited.
pub fn parse_expansion(v: &Value) -> Result<FourierExpansion> {
    let v = if v.get("schema").is_some() {
        v.pointer("/results/expansion")
            .ok_or_else(|| Error::Parse("document has no results.expansion".into()))?
    } else {
        v
    };
    let g = v
        .get("g")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("expansion needs an integer field g".into()))?
        as usize;
    let max_trace = v
        .get("max_trace")
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::Parse("expansion needs an integer field max_trace".into()))?;
    let mut f = FourierExpansion::zero(g, max_trace);
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("expansion needs a terms array".into()))?;
    for term in terms {
        let mat: Vec<Vec<i64>> = serde_json::from_value(
            term.get("T")
                .ok_or_else(|| Error::Parse("term without T matrix".into()))?
                .clone(),
        )?;
        if mat.len() != g || mat.iter().any(|row| row.len() != g) {
            return Err(Error::Parse(format!("T is not a {g} x {g} matrix")).into());
        }
        for i in 0..g {
            for j in 0..g {
                if mat[i][j] != mat[j][i] {
                    return Err(Error::Parse("T is not symmetric".into()).into());
                }
            }
        }
        let diag: Vec<i64> = (0..g).map(|i| mat[i][i]).collect();
        let mut off = Vec::with_capacity(g * g.saturating_sub(1) / 2);
        for i in 0..g {
            for j in (i + 1)..g {
                off.push(mat[i][j]);
            }
        }
        let t = ExpMat::from_parts(diag, off).map_err(|e| Error::Parse(e.to_string()))?;
        if t.trace() > max_trace {
            return Err(Error::Parse(format!(
                "term of trace {} above the declared max_trace {max_trace}",
                t.trace()
            ))
            .into());
        }
        let a = term
            .get("a")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("term without coefficient string a".into()))?;
        f.add_term(t, textform::parse_rational(a)?);
    }
    Ok(f)
}

pub fn load_expansion(path: &Path) -> Result<FourierExpansion> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    parse_expansion(&v)
}

/// `{"num_vars", "max_degree", "terms": [{"m": [exponents], "c": ...}]}`
/// with the coefficient rendered by `render`.
fn series_json<C: schottky_core::algebra::Scalar>(
    s: &MultiSeries<C>,
    render: impl Fn(&C) -> String,
) -> Value {
    let n = s.num_vars();
    let terms: Vec<Value> = s
        .terms()
        .map(|(m, c)| json!({ "m": m.padded(n), "c": render(c) }))
        .collect();
    json!({ "num_vars": n, "max_degree": s.max_degree(), "terms": terms })
}

pub fn series_rational_json(s: &MultiSeries<BigRational>) -> Value {
    series_json(s, textform::format_rational)
}

pub fn series_polyfrac_json(s: &MultiSeries<PolyFraction>) -> Value {
    series_json(s, textform::format_polyfrac)
}

pub fn table_json<C: schottky_core::algebra::Scalar>(
    t: &UniversalPeriodTable<C>,
    entry_json: impl Fn(&MultiSeries<C>) -> Value,
) -> Value {
    let g = t.g();
    let rows: Vec<Value> = (1..=g as u32)
        .map(|i| {
            Value::Array(
                (1..=g as u32)
                    .map(|j| entry_json(t.entry(i, j)))
                    .collect(),
            )
        })
        .collect();
    json!({ "g": g, "degree": t.degree(), "entries": rows })
}

pub fn rationals_json(values: &[BigRational]) -> Value {
    Value::Array(
        values
            .iter()
            .map(|r| Value::String(textform::format_rational(r)))
            .collect(),
    )
}

/// Comma-separated rationals: `"1,2,-5/3"`.
pub fn parse_rational_list(s: &str) -> Result<Vec<BigRational>> {
    s.split(',')
        .map(|item| textform::parse_rational(item).map_err(Into::into))
        .collect()
}

/// Point sets for the substitution commands. A bare count like `"3"` asks
/// for that many generated sets; anything else is read as semicolon-
/// separated explicit sets, `"1,2,4;1,3,9"`. Generated set k is the block
/// of consecutive integers starting at `1 + k (per_set + 1)`: positive and
/// strictly increasing, so the pairwise and mirror preconditions of the
/// evaluated setups hold automatically.
pub fn resolve_point_sets(spec: &str, per_set: usize) -> Result<Vec<Vec<BigRational>>> {
    let spec = spec.trim();
    if let Ok(count) = spec.parse::<usize>() {
        if count == 0 || count > 64 {
            return Err(Error::Parse(format!("point-set count {count} out of range 1..=64")).into());
        }
        return Ok((0..count)
            .map(|k| {
                (0..per_set)
                    .map(|i| BigRational::from_integer(((1 + k * (per_set + 1) + i) as i64).into()))
                    .collect()
            })
            .collect());
    }
    let sets: Vec<Vec<BigRational>> = spec
        .split(';')
        .map(parse_rational_list)
        .collect::<Result<_>>()?;
    for set in &sets {
        if set.len() != per_set {
            return Err(Error::Parse(format!(
                "each point set needs exactly {per_set} values, got {}",
                set.len()
            ))
            .into());
        }
    }
    Ok(sets)
}

pub fn parse_layer(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|item| {
            item.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad layer entry {item:?}")).into())
        })
        .collect()
}
