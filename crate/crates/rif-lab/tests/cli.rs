//! End-to-end tests of the binary: exit codes, schemas, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rif-lab"))
}

fn write_poly(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn p2_doc() -> &'static str {
    r#"{"vars":2,"terms":[{"exp":[0,0],"re":2,"im":0},{"exp":[1,0],"re":-1,"im":0},{"exp":[0,1],"re":-1,"im":0}]}"#
}

fn json_stdout(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn reflect_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write_poly(dir.path(), "p2.json", p2_doc());
    let out = bin().args(["reflect", "--poly"]).arg(&poly).output().unwrap();
    let v = json_stdout(&out);
    let terms = v["numerator"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
    // Sorted terms: (0,1) -> -1, (1,0) -> -1, (1,1) -> 2.
    assert_eq!(terms[0]["exp"], serde_json::json!([0, 1]));
    assert_eq!(terms[0]["re"], serde_json::json!(-1.0));
    assert_eq!(terms[2]["exp"], serde_json::json!([1, 1]));
    assert_eq!(terms[2]["re"], serde_json::json!(2.0));
}

#[test]
fn validate_accepts_stable_and_rejects_unstable() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_poly(dir.path(), "p2.json", p2_doc());
    let out = bin().args(["validate", "--poly"]).arg(&good).output().unwrap();
    let v = json_stdout(&out);
    assert!(v["max_unimodularity_defect"].as_f64().unwrap() < 1e-9);

    let bad = write_poly(
        dir.path(),
        "unstable.json",
        r#"{"vars":2,"terms":[{"exp":[0,0],"re":1,"im":0},{"exp":[1,1],"re":-2,"im":0}]}"#,
    );
    let out = bin().args(["validate", "--poly"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "unstable input must exit 2");
}

#[test]
fn malformed_documents_exit_2_and_bad_usage_exits_64() {
    let dir = tempfile::tempdir().unwrap();
    let dup = write_poly(
        dir.path(),
        "dup.json",
        r#"{"vars":2,"terms":[{"exp":[1,0],"re":1,"im":0},{"exp":[1,0],"re":1,"im":0}]}"#,
    );
    let out = bin().args(["validate", "--poly"]).arg(&dup).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let empty = write_poly(dir.path(), "empty.json", r#"{"vars":2,"terms":[]}"#);
    let out = bin().args(["validate", "--poly"]).arg(&empty).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["no-such-command"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));

    let poly = write_poly(dir.path(), "p2.json", p2_doc());
    let out = bin()
        .args(["classify", "--poly"])
        .arg(&poly)
        .args(["--alpha", "0.5"]) // wrong arity
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn classify_reproduces_worked_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write_poly(dir.path(), "p2.json", p2_doc());

    let out = bin()
        .args(["classify", "--poly"])
        .arg(&poly)
        .args(["--alpha", "0.5,0.5"])
        .output()
        .unwrap();
    let v = json_stdout(&out);
    assert_eq!(v["status"], "convergent");
    assert_eq!(v["method"], "series-classifier");

    let out = bin()
        .args(["classify", "--poly"])
        .arg(&poly)
        .args(["--alpha", "1,1"])
        .output()
        .unwrap();
    let v = json_stdout(&out);
    assert_eq!(v["status"], "divergent");
}

#[test]
fn classify_quadrature_cross_check() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write_poly(dir.path(), "p2.json", p2_doc());
    let out = bin()
        .args(["classify", "--poly"])
        .arg(&poly)
        .args(["--alpha", "-1,-1", "--inverse", "--quadrature"])
        .output()
        .unwrap();
    let v = json_stdout(&out);
    assert_eq!(v["status"], "convergent");
    let quad = &v["quadrature"];
    assert_eq!(quad["method"], "quadrature");
    // Equivalence constant pi^2 between the raw area integral and the
    // coefficient sum at the Bergman weight.
    let integral = quad["value"].as_f64().unwrap();
    let coeff = v["norm_estimate"].as_f64().unwrap();
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let ratio = integral / (pi2 * coeff);
    assert!(ratio > 0.5 && ratio < 2.0, "ratio {ratio}");
}

#[test]
fn expand_emits_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write_poly(dir.path(), "p2.json", p2_doc());
    let out = bin()
        .args(["expand", "--poly"])
        .arg(&poly)
        .args(["--orders", "4,4", "--rif"])
        .output()
        .unwrap();
    let v = json_stdout(&out);
    assert_eq!(v["coefficient_count"], 25);
    let coeffs = v["coefficients"].as_array().unwrap();
    // a(1,1) = 1/2 for the RIF.
    let a11 = coeffs
        .iter()
        .find(|t| t["exp"] == serde_json::json!([1, 1]))
        .unwrap();
    assert!((a11["re"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn loja_estimates_quadratic_decay() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write_poly(dir.path(), "p2.json", p2_doc());
    let out = bin()
        .args(["loja", "--poly"])
        .arg(&poly)
        .args(["--point", "1,0,1,0", "--alpha", "-0.9"])
        .output()
        .unwrap();
    let v = json_stdout(&out);
    let q = v["q_hat"].as_f64().unwrap();
    assert!((q - 2.0).abs() < 0.15, "q_hat {q}");
    assert_eq!(v["verdict"]["pass"], true);
    assert_eq!(v["estimate_method"], "decay-envelope");
    assert_eq!(v["verdict"]["method"], "theorem-implication");
}

#[test]
fn embed_with_explicit_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write_poly(
        dir.path(),
        "p3.json",
        r#"{"vars":3,"terms":[{"exp":[0,0,0],"re":3,"im":0},{"exp":[1,0,0],"re":-1,"im":0},{"exp":[0,1,0],"re":-1,"im":0},{"exp":[0,0,1],"re":-1,"im":0}]}"#,
    );
    let out = bin()
        .args(["embed", "--poly"])
        .arg(&poly)
        .args(["--alpha", "0.7,0.7,100", "--thresholds", "1.5,1.5,inf"])
        .output()
        .unwrap();
    let v = json_stdout(&out);
    assert_eq!(v["feasible"], true);
    assert_eq!(v["method"], "theorem-implication");

    let out = bin()
        .args(["embed", "--poly"])
        .arg(&poly)
        .args(["--alpha", "0.8,0.8,1", "--thresholds", "1.5,1.5,inf"])
        .output()
        .unwrap();
    let v = json_stdout(&out);
    assert_eq!(v["feasible"], false);
}

#[test]
fn report_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write_poly(dir.path(), "p2.json", p2_doc());
    let run = || {
        let out = bin()
            .args(["report", "--poly"])
            .arg(&poly)
            .args([
                "--alpha",
                "0.5,0.5",
                "--point",
                "1,0,1,0",
                "--omega-samples",
                "20000",
                "--seed",
                "11",
            ])
            .output()
            .unwrap();
        json_stdout(&out)
    };
    let mut a = run();
    let mut b = run();

    // Top-level schema.
    for key in ["version", "input", "stages", "timings"] {
        assert!(a.get(key).is_some(), "missing {key}");
    }
    assert_eq!(a["version"]["schema"], 1);
    assert_eq!(a["input"]["options"]["seed"], 11);
    let stages = a["stages"].as_object().unwrap();
    for key in ["reflect", "validate", "expand", "classify", "hardy", "embed", "loja"] {
        assert!(stages.contains_key(key), "missing stage {key}");
    }
    assert_eq!(a["stages"]["classify"]["status"], "convergent");
    assert_eq!(a["stages"]["embed"]["feasible"], true);
    let t1 = a["stages"]["hardy"]["entries"][0]["threshold"].as_f64().unwrap();
    assert!((t1 - 1.5).abs() < 0.15, "threshold {t1}");

    // Byte-stable modulo wall-clock timings.
    a.as_object_mut().unwrap().remove("timings");
    b.as_object_mut().unwrap().remove("timings");
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn csv_emission_for_curves() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write_poly(dir.path(), "p2.json", p2_doc());
    let csv = dir.path().join("partial_sums.csv");
    let out = bin()
        .args(["classify", "--poly"])
        .arg(&poly)
        .args(["--alpha", "0.5,0.5", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("order,partial_sum"));
    assert!(lines.clone().count() >= 4);
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 2);
        cells[0].parse::<f64>().unwrap();
        cells[1].parse::<f64>().unwrap();
    }

    let csv = dir.path().join("omega.csv");
    let out = bin()
        .args(["omega", "--poly"])
        .arg(&poly)
        .args(["--var", "1", "--samples", "5000", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,measure,std_err"));
}

#[test]
fn json_flag_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write_poly(dir.path(), "p2.json", p2_doc());
    let json = dir.path().join("out.json");
    let out = bin()
        .args(["validate", "--poly"])
        .arg(&poly)
        .args(["--json"])
        .arg(&json)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(v["interior_min_modulus"].as_f64().unwrap() > 0.0);
}
