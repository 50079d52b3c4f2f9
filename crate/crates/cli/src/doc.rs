//! Space documents.
//!
//! A document is one JSON object holding either `labels`, `dist` and
//! `weights` (plus optional `coords`), or a `generator`. Numbers may be
//! written as strings; a decimal string with at most six fraction digits is
//! read exactly.

use mmi_core::mass::{decimal_units, UNIT_SCALE};
use mmi_core::space::{validate_space, RawSpace};
use mmi_core::spaces::GeneratorSpec;
use mmi_core::FiniteMMSpace;
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};

/// Exact units of a plain decimal string such as `"0.125"`.
pub fn parse_decimal_units(s: &str) -> Option<i64> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if frac.len() > 6 || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || int.len() > 9 {
        return None;
    }
    let whole: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let mut f: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    for _ in frac.len()..6 {
        f *= 10;
    }
    let u = whole * UNIT_SCALE + f;
    Some(if neg { -u } else { u })
}

/// Units as a decimal string without trailing zeros.
pub fn format_units(u: i64) -> String {
    let sign = if u < 0 { "-" } else { "" };
    let a = u.unsigned_abs();
    let (int, frac) = (a / UNIT_SCALE as u64, a % UNIT_SCALE as u64);
    if frac == 0 {
        return format!("{sign}{int}");
    }
    let f = format!("{frac:06}");
    format!("{sign}{int}.{}", f.trim_end_matches('0'))
}

/// A number given as JSON number or string, with its exact units if any.
fn number(v: &Value, what: &str) -> Result<(f64, Option<i64>)> {
    match v {
        Value::Number(n) => {
            let x = n.as_f64().ok_or_else(|| CliError::Invalid(format!("{what}: not a number")))?;
            Ok((x, decimal_units(x)))
        }
        Value::String(s) => {
            let x: f64 = s.trim().parse().map_err(|_| CliError::Invalid(format!("{what}: cannot parse {s:?}")))?;
            Ok((x, parse_decimal_units(s)))
        }
        _ => Err(CliError::Invalid(format!("{what}: expected a number"))),
    }
}

fn array<'a>(v: Option<&'a Value>, what: &str) -> Result<&'a Vec<Value>> {
    v.and_then(Value::as_array).ok_or_else(|| CliError::Invalid(format!("missing array `{what}`")))
}

/// Parses and validates a document.
pub fn parse_document(text: &str) -> Result<FiniteMMSpace> {
    let v: Value = serde_json::from_str(text)?;
    let obj = v.as_object().ok_or_else(|| CliError::Invalid("document must be a JSON object".into()))?;
    if let Some(g) = obj.get("generator") {
        let spec: GeneratorSpec = serde_json::from_value(g.clone())?;
        return Ok(spec.build()?);
    }
    let dist = array(obj.get("dist"), "dist")?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.as_array()
                .ok_or_else(|| CliError::Invalid(format!("dist row {i} is not an array")))?
                .iter()
                .map(|x| number(x, "dist").map(|p| p.0))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let parsed = array(obj.get("weights"), "weights")?.iter().map(|x| number(x, "weights")).collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = parsed.iter().map(|p| p.0).collect();
    let units: Option<Vec<i64>> = parsed.iter().map(|p| p.1).collect();
    let labels = match obj.get("labels") {
        Some(l) => l
            .as_array()
            .ok_or_else(|| CliError::Invalid("labels must be an array".into()))?
            .iter()
            .map(|s| s.as_str().map(String::from).ok_or_else(|| CliError::Invalid("labels must be strings".into())))
            .collect::<Result<Vec<_>>>()?,
        None => (0..weights.len()).map(|i| format!("p{i}")).collect(),
    };
    let coords = match obj.get("coords") {
        Some(c) => Some(
            c.as_array()
                .ok_or_else(|| CliError::Invalid("coords must be an array".into()))?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| CliError::Invalid("coords rows must be arrays".into()))?
                        .iter()
                        .map(|x| number(x, "coords").map(|p| p.0))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(validate_space(RawSpace { labels, dist, weights, weight_units: units, coords })?)
}

/// The document for `space`; exact weights are written as decimal strings.
pub fn emit_document(space: &FiniteMMSpace) -> Value {
    let weights: Vec<Value> = match space.weight_units() {
        Some(u) => u.iter().map(|&x| Value::String(format_units(x))).collect(),
        None => space.weights().iter().map(|&w| json!(w)).collect(),
    };
    let mut obj = Map::new();
    obj.insert("labels".into(), json!(space.labels()));
    obj.insert("dist".into(), json!(space.dist_rows()));
    obj.insert("weights".into(), Value::Array(weights));
    if let Some(c) = space.coords() {
        obj.insert("coords".into(), json!(c));
    }
    Value::Object(obj)
}
