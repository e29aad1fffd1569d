use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const GOLDEN: &str = r#"{"format_version": 1, "k": 2, "rows": [[1, 1], [1, 0]]}"#;
const FULL2: &str = r#"{"format_version": 1, "k": 2, "rows": [[1, 1], [1, 1]]}"#;
const ROOF12: &str = r#"{"format_version": 1, "window": [0, 0], "table": {"0": 1.0, "1": 2.0}}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &TempDir, h: &str) -> (Output, PathBuf) {
    let m = write(dir, "golden.json", GOLDEN);
    let r = write(dir, "roof.json", ROOF12);
    let rep = dir.path().join("report.json");
    let out = run(&["synthesize", s(&m), s(&r), "--target-h", h, "--out", s(&rep)]);
    (out, rep)
}

#[test]
fn info_reports_entropy() {
    let dir = TempDir::new().unwrap();
    let out = run(&["info", s(&write(&dir, "g.json", GOLDEN))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["h_top"].as_f64().unwrap() - 0.481_211_825_059_603_4).abs() < 1e-12);
    assert_eq!(v["aperiodic"], true);

    let out = run(&["info", s(&write(&dir, "f.json", FULL2))]);
    assert!((json(&out)["h_top"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-13);
}

#[test]
fn info_on_reducible_matrix_warns() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "id.json", r#"{"format_version": 1, "k": 2, "rows": [[1, 0], [0, 1]]}"#);
    let out = run(&["info", s(&m)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["irreducible"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));

    let out = run(&["parry", s(&m)]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn malformed_input_reports_position() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "bad.json", "{\"format_version\": 1,\n  \"k\": 2,\n  \"rows\": [[1, 1], [1, ]]\n}");
    let out = run(&["info", s(&m)]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");

    let m = write(&dir, "ragged.json", r#"{"format_version": 1, "k": 2, "rows": [[1, 1]]}"#);
    assert_eq!(run(&["info", s(&m)]).status.code(), Some(3));
    let m = write(&dir, "ver.json", r#"{"format_version": 9, "k": 1, "rows": [[1]]}"#);
    assert_eq!(run(&["info", s(&m)]).status.code(), Some(3));
}

#[test]
fn synthesize_then_verify() {
    let dir = TempDir::new().unwrap();
    let (out, rep) = synth(&dir, "0.15");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let report: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert!((report["achieved"].as_f64().unwrap() - 0.15).abs() <= 1e-8);
    assert_eq!(report["inputs_hash"].as_str().unwrap().len(), 64);

    let out = run(&["verify", s(&rep), "--samples", "200000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let checks = json(&out)["checks"].as_array().unwrap().clone();
    assert!(checks.iter().any(|c| c["name"] == "monte_carlo_entropy"));
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn analytic_only_verification() {
    let dir = TempDir::new().unwrap();
    let (_, rep) = synth(&dir, "0.2");
    let out = run(&["verify", s(&rep), "--samples", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(!names.iter().any(|n| n.starts_with("monte_carlo")));
}

#[test]
fn tampered_report_fails_verification() {
    let dir = TempDir::new().unwrap();
    let (_, rep) = synth(&dir, "0.15");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    v["achieved"] = Value::from(v["achieved"].as_f64().unwrap() + 1e-6);
    std::fs::write(&rep, serde_json::to_string(&v).unwrap()).unwrap();
    let out = run(&["verify", s(&rep), "--samples", "0"]);
    assert_eq!(out.status.code(), Some(7));

    // altering the inputs breaks the hash
    let (_, rep) = synth(&dir, "0.15");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    v["inputs"]["tol"] = Value::from(0.5);
    std::fs::write(&rep, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(run(&["verify", s(&rep), "--samples", "0"]).status.code(), Some(7));
}

#[test]
fn out_of_range_targets() {
    let dir = TempDir::new().unwrap();
    for h in ["10", "-1", "0"] {
        let (out, _) = synth(&dir, h);
        assert_eq!(out.status.code(), Some(4), "h = {h}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("top entropy"));
    }
}

#[test]
fn report_round_trips_bit_exactly() {
    let dir = TempDir::new().unwrap();
    let (_, rep) = synth(&dir, "0.3");
    let text = std::fs::read_to_string(&rep).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    let back: Value = serde_json::from_str(&again).unwrap();
    assert_eq!(v, back);
    let p = v["chain"]["p"].as_array().unwrap();
    let sum: f64 = p.iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((sum - 1.0).abs() < 1e-12);
}

#[test]
fn sample_and_path() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "g.json", GOLDEN);
    let out = run(&["sample", s(&m), "--samples", "50000", "--seed", "3", "--show", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["source"], "parry");
    let head = v["head"].as_str().unwrap();
    assert_eq!(head.len(), 16);
    assert!(!head.contains("11"));
    let e = &v["entropy"];
    let z = (e["estimate"].as_f64().unwrap() - e["analytic"].as_f64().unwrap()) / e["stderr"].as_f64().unwrap();
    assert!(z.abs() < 3.0);

    let out = run(&["path", s(&m), "--points", "5", "--target-h", "0.3"]);
    let v = json(&out);
    assert_eq!(v["table"].as_array().unwrap().len(), 5);
    assert!((v["solution"]["entropy"].as_f64().unwrap() - 0.3).abs() < 1e-10);
}

#[test]
fn recode_and_flatten() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "g.json", GOLDEN);
    let v = json(&run(&["recode", s(&m), "-n", "3"]));
    assert_eq!(v["k_n"], 5);
    assert!(v["entropy_residual"].as_f64().unwrap() < 1e-12);

    let r = write(&dir, "r.json", ROOF12);
    let v = json(&run(&["flatten", s(&m), s(&r)]));
    assert_eq!(v["L"], 3);
    assert_eq!(v["exact"], true);
    let b = v["flow_top_entropy_bounds"].as_array().unwrap();
    // Bowen root of 1 = x^-1 + x^-2 - ... reduces to lambda^3 = lambda^2 + 1
    let lambda = v["lambda_b"].as_f64().unwrap();
    assert!((lambda.powi(3) - lambda.powi(2) - 1.0).abs() < 1e-12);
    assert!((b[0].as_f64().unwrap() - lambda.ln()).abs() < 1e-14);
}
