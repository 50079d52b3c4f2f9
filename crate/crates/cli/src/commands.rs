//! The subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmi_core::diameters::{
    diam_doubleprime_with, diam_prime, multi_partial_diameter_with, partial_diameter_upper, partial_diameter_with,
    underline_diam_with,
};
use mmi_core::obsdiam::{
    coordinate_projection_estimate, obsdiam_aggregate_with, obsdiam_doubleprime_with, obsdiam_exact_with, obsdiam_lower,
    underline_obsdiam_lower, underline_obsdiam_with, ObsResult, DEFAULT_BUDGET,
};
use mmi_core::spaces::{sphere_sample, GeneratorSpec};
use mmi_core::{atoms, AlphaVector, Error, FiniteMMSpace, Limits};
use serde_json::{json, Value};

use crate::doc::{emit_document, format_units, parse_decimal_units, parse_document};
use crate::error::{CliError, Result};
use crate::manifest::{comment_line, limits_from_env, ManifestBuilder, Mode};
use crate::suites::{run_suite, Suite};

#[derive(Debug, Parser)]
#[command(name = "mmi", version, about = "Invariants of finite metric measure spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one invariant of a space.
    Compute(ComputeArgs),
    /// Tabulate an invariant over a grid of alpha values.
    Sweep(SweepArgs),
    /// Run a seeded verification campaign.
    Verify(VerifyArgs),
    /// Observable diameter estimates for sampled spheres.
    Levy(LevyArgs),
    /// Write a generated space as a document.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Invariant {
    PartialDiameter,
    Obsdiam,
    ObsdiamLower,
    MultiPartialDiameter,
    UnderlineDiam,
    UnderlineObsdiam,
    DiamPrime,
    DiamDoubleprime,
    ObsdiamDoubleprime,
    ObsdiamAggregate,
    Diameter,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub invariant: Invariant,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Comma-separated alpha vector.
    #[arg(long)]
    pub abar: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the witness (field or decomposition) to this JSON file.
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub invariant: Invariant,
    /// `start:stop:step`, or `breakpoints` for the partial sums of the atom masses.
    #[arg(long)]
    pub grid: String,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// JSON report; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Radius {
    /// Unit spheres.
    One,
    /// Radius the square root of the dimension.
    Sqrt,
}

#[derive(Debug, Args)]
pub struct LevyArgs {
    /// Comma-separated sphere dimensions.
    #[arg(long, default_value = "2,4,8,16,32")]
    pub dims: String,
    #[arg(long, value_enum, default_value = "one")]
    pub radius: Radius,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator as inline JSON, for example `{"kind":"grid","dim":2,"per_axis":3}`.
    #[arg(long)]
    pub spec: String,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command, writing standard output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn std::io::Write) -> Result<()> {
    match cli.command {
        Command::Compute(a) => compute(a, stdout),
        Command::Sweep(a) => sweep(a, stdout),
        Command::Verify(a) => verify(a, stdout),
        Command::Levy(a) => levy(a, stdout),
        Command::Generate(a) => generate(a, stdout),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(CliError::io(path))
}

fn emit(out: Option<&Path>, stdout: &mut dyn std::io::Write, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(CliError::io(p)),
        None => stdout.write_all(text.as_bytes()).map_err(CliError::io("<stdout>")),
    }
}

fn parse_alpha(s: &str, mode: Mode) -> Result<f64> {
    if let Some(u) = parse_decimal_units(s) {
        return Ok(mmi_core::mass::units_to_f64(u));
    }
    if mode == Mode::Rational {
        return Err(CliError::Invalid(format!("rational mode needs decimal alphas, got {s:?}")));
    }
    s.trim().parse().map_err(|_| CliError::Invalid(format!("cannot parse alpha {s:?}")))
}

fn parse_abar(s: &str, mode: Mode) -> Result<AlphaVector> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let units: Option<Vec<i64>> = parts.iter().map(|p| parse_decimal_units(p)).collect();
    match units {
        Some(u) => Ok(AlphaVector::from_units(u)?),
        None if mode == Mode::Rational => Err(CliError::Invalid(format!("rational mode needs decimal alphas, got {s:?}"))),
        None => {
            let v = parts
                .iter()
                .map(|p| p.parse::<f64>().map_err(|_| CliError::Invalid(format!("cannot parse alpha {p:?}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(AlphaVector::new(v)?)
        }
    }
}

fn invariant_name(inv: Invariant) -> String {
    inv.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Heuristic => "heuristic",
        Mode::Rational => "rational",
    }
}

/// A computed value with how it was obtained.
struct Computed {
    value: f64,
    kind: &'static str,
    witness: Option<Value>,
}

fn obs_value(r: ObsResult, kind: &'static str) -> Computed {
    Computed { value: r.value, kind, witness: Some(json!({ "field": r.witness.values(), "upper_bound": r.upper_bound })) }
}

fn is_cap(e: &Error) -> bool {
    matches!(e, Error::SizeLimitExceeded { .. })
}

/// Evaluates `inv`. In heuristic mode a refused exact solver is replaced by
/// a bound, and the cap is recorded.
fn evaluate(
    space: &FiniteMMSpace,
    inv: Invariant,
    alpha: Option<f64>,
    abar: Option<&AlphaVector>,
    mode: Mode,
    seed: u64,
    limits: &Limits,
    caps: &mut Vec<String>,
) -> Result<Computed> {
    let heuristic = mode == Mode::Heuristic;
    let fallback = |e: Error, caps: &mut Vec<String>| -> Result<()> {
        if heuristic && is_cap(&e) {
            if let Error::SizeLimitExceeded { what, .. } = &e {
                caps.push(what.to_string());
            }
            Ok(())
        } else {
            Err(e.into())
        }
    };
    let a = || alpha.ok_or_else(|| CliError::Invalid(format!("--alpha is required for {}", invariant_name(inv))));
    let ab = || abar.ok_or_else(|| CliError::Invalid(format!("--abar is required for {}", invariant_name(inv))));
    Ok(match inv {
        Invariant::PartialDiameter => match partial_diameter_with(space, a()?, limits) {
            Ok(v) => Computed { value: v, kind: "exact", witness: None },
            Err(e) => {
                fallback(e, caps)?;
                Computed { value: partial_diameter_upper(space, a()?)?, kind: "upper_bound", witness: None }
            }
        },
        Invariant::Obsdiam => match obsdiam_exact_with(space, a()?, limits) {
            Ok(r) => obs_value(r, "exact"),
            Err(e) => {
                fallback(e, caps)?;
                obs_value(obsdiam_lower(space, a()?, DEFAULT_BUDGET, seed)?, "lower_bound")
            }
        },
        Invariant::ObsdiamLower => obs_value(obsdiam_lower(space, a()?, DEFAULT_BUDGET, seed)?, "lower_bound"),
        Invariant::UnderlineObsdiam => match underline_obsdiam_with(space, ab()?, limits) {
            Ok(r) => obs_value(r, "exact"),
            Err(e) => {
                fallback(e, caps)?;
                obs_value(underline_obsdiam_lower(space, ab()?, DEFAULT_BUDGET, seed)?, "lower_bound")
            }
        },
        Invariant::ObsdiamDoubleprime => obs_value(obsdiam_doubleprime_with(space, ab()?, limits)?, "exact"),
        Invariant::MultiPartialDiameter => {
            Computed { value: multi_partial_diameter_with(space, ab()?, limits)?.to_f64(), kind: "exact", witness: None }
        }
        Invariant::UnderlineDiam => {
            let r = underline_diam_with(space, ab()?, limits)?;
            let witness = r.decomposition.as_ref().map(|d| json!({ "decomposition": d }));
            Computed { value: r.value.to_f64(), kind: "exact", witness }
        }
        Invariant::DiamPrime => Computed { value: diam_prime(space, ab()?)?, kind: "exact", witness: None },
        Invariant::DiamDoubleprime => {
            Computed { value: diam_doubleprime_with(space, ab()?, limits)?, kind: "exact", witness: None }
        }
        Invariant::ObsdiamAggregate => {
            let r = obsdiam_aggregate_with(space, limits, seed)?;
            let kind = match r.mode {
                mmi_core::obsdiam::ObsMode::Exact => "exact",
                mmi_core::obsdiam::ObsMode::LowerBound => "lower_bound",
            };
            Computed { value: r.value, kind, witness: Some(json!({ "alpha": r.alpha })) }
        }
        Invariant::Diameter => Computed { value: space.diameter(), kind: "exact", witness: None },
    })
}

fn load(path: &Path) -> Result<(Vec<u8>, FiniteMMSpace)> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Invalid("document is not UTF-8".into()))?;
    let space = parse_document(&text)?;
    Ok((bytes, space))
}

fn compute(a: ComputeArgs, stdout: &mut dyn std::io::Write) -> Result<()> {
    let (limits, certified) = limits_from_env()?;
    let (bytes, space) = load(&a.input)?;
    let alpha = a.alpha.as_deref().map(|s| parse_alpha(s, a.mode)).transpose()?;
    let abar = a.abar.as_deref().map(|s| parse_abar(s, a.mode)).transpose()?;
    let mut input = bytes;
    write!(
        byte_writer(&mut input),
        "\n{}|{:?}|{:?}|{}",
        invariant_name(a.invariant),
        a.alpha,
        a.abar,
        mode_name(a.mode)
    )
    .ok();
    let mut m = ManifestBuilder::new("compute", &input, Some(a.seed), a.mode, certified);
    let v = evaluate(&space, a.invariant, alpha, abar.as_ref(), a.mode, a.seed, &limits, &mut m.caps_hit)?;
    let mut text = format!("{}\n", v.value);
    if let Some(path) = &a.witness {
        let w = json!({ "invariant": invariant_name(a.invariant), "value": v.value, "kind": v.kind, "witness": v.witness });
        fs::write(path, serde_json::to_string_pretty(&w)? + "\n").map_err(CliError::io(path))?;
        writeln!(text, "# witness: {}", path.display()).ok();
    }
    if v.kind != "exact" {
        writeln!(text, "# bound: {}", v.kind).ok();
    }
    text.push_str(&comment_line(&m.finish()));
    emit(None, stdout, &text)
}

/// Appends to a byte buffer through `fmt::Write`.
fn byte_writer(buf: &mut Vec<u8>) -> ByteWriter<'_> {
    ByteWriter(buf)
}

struct ByteWriter<'a>(&'a mut Vec<u8>);

impl std::fmt::Write for ByteWriter<'_> {
    fn write_str(&mut self, s: &str) -> std::fmt::Result {
        self.0.extend_from_slice(s.as_bytes());
        Ok(())
    }
}

/// Grid points as (label, value), exact when given in decimals.
pub fn parse_grid(spec: &str, space: &FiniteMMSpace) -> Result<Vec<(String, f64)>> {
    if spec.trim() == "breakpoints" {
        let mut acc_u = 0i64;
        let mut acc = 0.0;
        let units = space.weight_units();
        return Ok(atoms(space)
            .into_iter()
            .map(|(x, w)| match units {
                Some(u) => {
                    acc_u += u[x];
                    (format_units(acc_u), mmi_core::mass::units_to_f64(acc_u))
                }
                None => {
                    acc += w;
                    let v = acc.min(1.0);
                    (format!("{v}"), v)
                }
            })
            .collect());
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Invalid(format!("grid must be start:stop:step or breakpoints, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let u: Vec<i64> = parts.iter().map(|p| parse_decimal_units(p)).collect::<Option<_>>().ok_or_else(bad)?;
    let (start, stop, step) = (u[0], u[1], u[2]);
    if step <= 0 || start > stop || start <= 0 || stop > mmi_core::mass::UNIT_SCALE {
        return Err(CliError::Invalid(format!("grid {spec:?} must satisfy 0 < start <= stop <= 1 and step > 0")));
    }
    Ok((0..)
        .map(|k| start + k * step)
        .take_while(|&x| x <= stop)
        .map(|x| (format_units(x), mmi_core::mass::units_to_f64(x)))
        .collect())
}

/// Slack before a decrease in an exact sweep counts as a violation.
const MONOTONE_TOL: f64 = 1e-9;

fn sweep(a: SweepArgs, stdout: &mut dyn std::io::Write) -> Result<()> {
    if !matches!(a.invariant, Invariant::PartialDiameter | Invariant::Obsdiam | Invariant::ObsdiamLower) {
        return Err(CliError::Invalid("sweep supports partial-diameter, obsdiam and obsdiam-lower".into()));
    }
    let (limits, certified) = limits_from_env()?;
    let (mut input, space) = load(&a.input)?;
    write!(byte_writer(&mut input), "\n{}|{}|{}", invariant_name(a.invariant), a.grid, mode_name(a.mode)).ok();
    let mut m = ManifestBuilder::new("sweep", &input, Some(a.seed), a.mode, certified);
    let grid = parse_grid(&a.grid, &space)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut last_exact: Option<f64> = None;
    let mut running = f64::NEG_INFINITY;
    for (label, alpha) in &grid {
        let v = evaluate(&space, a.invariant, Some(*alpha), None, a.mode, a.seed, &limits, &mut m.caps_hit)?;
        let value = if v.kind == "exact" {
            if let Some(prev) = last_exact {
                if v.value < prev - MONOTONE_TOL {
                    return Err(CliError::Monotonicity { alpha: label.clone(), previous: prev, value: v.value });
                }
            }
            last_exact = Some(v.value);
            v.value
        } else {
            // bounds from independent runs, made monotone
            running = running.max(v.value);
            running
        };
        rows.push((label.clone(), value, v.kind));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "value", "mode"]).map_err(csv_err)?;
    for (label, value, kind) in &rows {
        w.write_record([label.as_str(), &value.to_string(), kind]).map_err(csv_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))?).expect("csv is UTF-8");
    let text = comment_line(&m.finish()) + &body;
    emit(a.out.as_deref(), stdout, &text)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Invalid(format!("csv: {e}"))
}

fn verify(a: VerifyArgs, stdout: &mut dyn std::io::Write) -> Result<()> {
    let (limits, certified) = limits_from_env()?;
    let input = format!("{}|{}|{}", a.suite.name(), a.count, a.seed);
    let mut m = ManifestBuilder::new("verify", input.as_bytes(), Some(a.seed), a.mode, certified);
    let report = run_suite(a.suite, a.count, a.seed, &limits);
    if report.skipped > 0 {
        m.caps_hit.push(format!("{} instance(s) over the size caps", report.skipped));
    }
    let failures = report.failures.len();
    let doc = json!({ "manifest": m.finish(), "report": report });
    emit(a.out.as_deref(), stdout, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    if failures > 0 {
        return Err(CliError::Inconsistent { suite: a.suite.name().into(), count: failures });
    }
    Ok(())
}

fn levy(a: LevyArgs, stdout: &mut dyn std::io::Write) -> Result<()> {
    let (_, certified) = limits_from_env()?;
    let dims: Vec<usize> = a
        .dims
        .split(',')
        .map(|d| d.trim().parse().ok().filter(|&n: &usize| n >= 1))
        .collect::<Option<_>>()
        .ok_or_else(|| CliError::Invalid(format!("--dims must be positive integers, got {:?}", a.dims)))?;
    if a.samples == 0 {
        return Err(CliError::Invalid("--samples must be positive".into()));
    }
    let input = format!("{}|{:?}|{}|{}|{}", a.dims, a.radius, a.alpha, a.samples, a.seed);
    let m = ManifestBuilder::new("levy", input.as_bytes(), Some(a.seed), a.mode, certified);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "obsdiam_lower", "partial_estimate"]).map_err(csv_err)?;
    for &n in &dims {
        let r = match a.radius {
            Radius::One => 1.0,
            Radius::Sqrt => (n as f64).sqrt(),
        };
        let s = sphere_sample(n, r, a.samples, a.seed.wrapping_add(n as u64));
        let obs = coordinate_projection_estimate(&s, a.alpha)?;
        let part = partial_diameter_upper(&s, a.alpha)?;
        w.write_record([n.to_string(), obs.to_string(), part.to_string()]).map_err(csv_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))?).expect("csv is UTF-8");
    emit(a.out.as_deref(), stdout, &(comment_line(&m.finish()) + &body))
}

fn generate(a: GenerateArgs, stdout: &mut dyn std::io::Write) -> Result<()> {
    let (_, certified) = limits_from_env()?;
    let spec: GeneratorSpec = serde_json::from_str(&a.spec)?;
    let space = spec.build()?;
    let m = ManifestBuilder::new("generate", a.spec.as_bytes(), None, a.mode, certified);
    let mut doc = emit_document(&space);
    doc["manifest"] = serde_json::to_value(m.finish())?;
    emit(a.out.as_deref(), stdout, &(serde_json::to_string_pretty(&doc)? + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_grids_are_exact() {
        let s = FiniteMMSpace::one_point();
        let g = parse_grid("0.1:0.3:0.1", &s).unwrap();
        let labels: Vec<&str> = g.iter().map(|p| p.0.as_str()).collect();
        assert_eq!(labels, ["0.1", "0.2", "0.3"]);
        assert!(parse_grid("0:1:0.1", &s).is_err());
        assert!(parse_grid("0.1:0.2", &s).is_err());
    }

    #[test]
    fn breakpoints_are_atom_partial_sums() {
        let text = r#"{"dist":[[0,1,2],[1,0,1],[2,1,0]],"weights":["0.2","0.5","0.3"]}"#;
        let s = parse_document(text).unwrap();
        let g = parse_grid("breakpoints", &s).unwrap();
        let labels: Vec<&str> = g.iter().map(|p| p.0.as_str()).collect();
        assert_eq!(labels, ["0.5", "0.8", "1"]);
    }

    #[test]
    fn alpha_vectors() {
        assert_eq!(parse_abar("0.5, 0.25", Mode::Rational).unwrap().units(), Some(&[500_000, 250_000][..]));
        assert!(parse_abar("0.1234567", Mode::Rational).is_err());
        assert!(parse_abar("0.1234567", Mode::Exact).is_ok());
        assert!(parse_alpha("x", Mode::Exact).is_err());
    }
}
