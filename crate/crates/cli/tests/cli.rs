mod common;

use common::{data, mmi};
use mmi_cli::doc::parse_document;
use mmi_cli::error::{CliError, EXIT_CAP, EXIT_INCONSISTENT, EXIT_INVALID, EXIT_MONOTONICITY, EXIT_OK};
use mmi_core::diameters::partial_diameter;
use mmi_core::obsdiam::obsdiam_exact;
use mmi_core::spaces::GeneratorSpec;

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_line(o: &std::process::Output) -> String {
    stdout(o).lines().next().unwrap_or_default().to_string()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn partial_diameter_of_the_two_point_example() {
    let o = mmi(&["compute", "--input", path(&data("two_point.json")), "--invariant", "partial-diameter", "--alpha", "0.7"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert_eq!(first_line(&o), "1");
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("# manifest: {"));
}

#[test]
fn one_point_observable_diameter_is_zero() {
    let o = mmi(&["compute", "--input", path(&data("one_point.json")), "--invariant", "obsdiam", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert_eq!(first_line(&o), "0");
}

#[test]
fn malformed_documents_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [("syntax.json", "{ not json"), ("shape.json", r#"{"dist":[[0,1]],"weights":[1]}"#), ("mass.json", r#"{"dist":[[0]],"weights":[0.5]}"#)] {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        let o = mmi(&["compute", "--input", path(&p), "--invariant", "diameter"]);
        assert_eq!(o.status.code(), Some(EXIT_INVALID), "{name}");
    }
    let o = mmi(&["compute", "--input", "/nonexistent/doc.json", "--invariant", "diameter"]);
    assert_eq!(o.status.code(), Some(EXIT_INVALID));
    let o = mmi(&["compute", "--input", path(&data("two_point.json")), "--invariant", "obsdiam"]);
    assert_eq!(o.status.code(), Some(EXIT_INVALID), "missing alpha");
    let o = mmi(&["compute", "--input", path(&data("two_point.json")), "--invariant", "obsdiam", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(EXIT_INVALID), "alpha out of range");
    let o = mmi(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(EXIT_INVALID));
}

#[test]
fn caps_exit_3_unless_heuristic() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("big.json");
    let spec = r#"{"kind":"random_discrete","points":12,"seed":1,"atomic_bias":0.3}"#;
    assert_eq!(mmi(&["generate", "--spec", spec, "--out", path(&doc)]).status.code(), Some(EXIT_OK));
    let exact = mmi(&["compute", "--input", path(&doc), "--invariant", "obsdiam", "--alpha", "0.5"]);
    assert_eq!(exact.status.code(), Some(EXIT_CAP));
    let heur = mmi(&["compute", "--input", path(&doc), "--invariant", "obsdiam", "--alpha", "0.5", "--mode", "heuristic"]);
    assert_eq!(heur.status.code(), Some(EXIT_OK));
    let text = stdout(&heur);
    assert!(text.contains("# bound: lower_bound"));
    assert!(text.contains(r#""caps_hit":["obsdiam_exact points"]"#));
}

#[test]
fn cap_override_marks_the_manifest_uncertified() {
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_mmi"))
        .args(["compute", "--input", path(&data("one_point.json")), "--invariant", "diameter"])
        .env("MMI_CAP_OVERRIDE", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert!(stdout(&o).contains(r#""certified":false"#));
    let bad = std::process::Command::new(env!("CARGO_BIN_EXE_mmi"))
        .args(["compute", "--input", path(&data("one_point.json")), "--invariant", "diameter"])
        .env("MMI_CAP_OVERRIDE", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INVALID));
}

#[test]
fn remaining_exit_codes() {
    // campaigns and sweeps only produce these on solver bugs
    assert_eq!(CliError::Inconsistent { suite: "mt1".into(), count: 1 }.exit_code(), EXIT_INCONSISTENT);
    let m = CliError::Monotonicity { alpha: "0.5".into(), previous: 1.0, value: 0.0 };
    assert_eq!(m.exit_code(), EXIT_MONOTONICITY);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>().len(), 3);
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn sweep_of_two_equal_atoms_jumps_after_one_half() {
    let o = mmi(&["sweep", "--input", path(&data("two_point_equal.json")), "--invariant", "obsdiam", "--grid", "0.1:1:0.1"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let text = stdout(&o);
    assert!(text.starts_with("# manifest: "));
    assert_eq!(text.lines().nth(1), Some("alpha,value,mode"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 10);
    for row in &rows {
        let a: f64 = row[0].parse().unwrap();
        assert_eq!(row[1], if a <= 0.5 { "0" } else { "1" }, "alpha {a}");
        assert_eq!(row[2], "exact");
    }
}

#[test]
fn one_point_sweep_is_zero_and_breakpoints_are_partial_sums() {
    let o = mmi(&["sweep", "--input", path(&data("one_point.json")), "--invariant", "partial-diameter", "--grid", "0.25:1:0.25"]);
    assert!(csv_rows(&stdout(&o)).iter().all(|r| r[1] == "0"));
    let o = mmi(&["sweep", "--input", path(&data("path4.json")), "--invariant", "partial-diameter", "--grid", "breakpoints"]);
    let alphas: Vec<String> = csv_rows(&stdout(&o)).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(alphas, ["0.4", "0.7", "0.9", "1"]);
    let bad = mmi(&["sweep", "--input", path(&data("path4.json")), "--invariant", "partial-diameter", "--grid", "0.5:0.1"]);
    assert_eq!(bad.status.code(), Some(EXIT_INVALID));
}

#[test]
fn heuristic_sweeps_stay_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("big.json");
    let spec = r#"{"kind":"random_discrete","points":10,"seed":4,"atomic_bias":0.0}"#;
    mmi(&["generate", "--spec", spec, "--out", path(&doc)]);
    let out = dir.path().join("sweep.csv");
    let o = mmi(&["sweep", "--input", path(&doc), "--invariant", "obsdiam", "--grid", "0.1:1:0.1", "--mode", "heuristic", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    let vals: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    assert!(rows.iter().all(|r| r[2] == "lower_bound"));
}

#[test]
fn generated_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("g.json");
    let spec_text = r#"{"kind":"random_discrete","points":6,"seed":11,"atomic_bias":0.5}"#;
    let o = mmi(&["generate", "--spec", spec_text, "--out", path(&doc)]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let text = std::fs::read_to_string(&doc).unwrap();
    assert!(text.contains("\"manifest\""));
    let parsed = parse_document(&text).unwrap();
    let spec: GeneratorSpec = serde_json::from_str(spec_text).unwrap();
    let built = spec.build().unwrap();
    assert_eq!(parsed, built);
    for a in [0.3, 0.5, 0.9] {
        assert_eq!(partial_diameter(&parsed, a).unwrap(), partial_diameter(&built, a).unwrap());
        assert_eq!(obsdiam_exact(&parsed, a).unwrap().value, obsdiam_exact(&built, a).unwrap().value);
        let o = mmi(&["compute", "--input", path(&doc), "--invariant", "partial-diameter", "--alpha", &a.to_string()]);
        assert_eq!(first_line(&o), partial_diameter(&built, a).unwrap().to_string());
    }
}

#[test]
fn witnesses_are_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let o = mmi(&["compute", "--input", path(&data("path4.json")), "--invariant", "obsdiam", "--alpha", "0.6", "--witness", path(&w)]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(v["invariant"], "obsdiam");
    assert_eq!(v["witness"]["field"].as_array().unwrap().len(), 4);
}

#[test]
fn multivariable_invariants_from_the_command_line() {
    let doc = data("path4.json");
    let run = |inv: &str, abar: &str| first_line(&mmi(&["compute", "--input", path(&doc), "--invariant", inv, "--abar", abar]));
    assert_eq!(run("underline-diam", "0.4,0.3"), "0");
    assert_eq!(run("multi-partial-diameter", "0.4,0.3"), "0");
    assert_eq!(run("multi-partial-diameter", "0.6,0.5"), "inf");
    assert_eq!(run("diam-doubleprime", "0.4,0.3"), "0");
}

#[test]
fn verify_writes_a_report_and_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = mmi(&["verify", "--suite", "mt1", "--count", "20", "--seed", "7", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["report"]["checked"], 60);
    assert_eq!(v["report"]["failures"].as_array().unwrap().len(), 0);
    assert_eq!(v["manifest"]["command"], "verify");
}
