use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_collapse-spectra"));
    cmd.env_remove("COLLAPSE_SPECTRA_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn rows(report: &Value) -> &Vec<Value> {
    report["results"]["table"]["rows"].as_array().unwrap()
}

fn strip_wall_time(mut v: Value) -> Value {
    v["provenance"]["wall_time"] = Value::Null;
    v
}

#[test]
fn limit_lists_union_of_disk_spectra() {
    let report = json(&["limit", "--count", "5"]);
    let keys: Vec<&String> = report.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["command", "config", "results", "flags", "provenance"]);
    let rows = rows(&report);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][1].as_f64(), Some(0.0));
    assert_eq!(rows[1][2], "neumann");
    assert_eq!(rows[1][5], 2);
    assert!((rows[1][1].as_f64().unwrap() - 3.389957716671889).abs() < 1e-12);
    assert_eq!(rows[2][2], "dirichlet");
    assert!((rows[2][1].as_f64().unwrap() - 5.783185962946784).abs() < 1e-12);
}

#[test]
fn limit_rejects_zero_count() {
    assert_eq!(run(&["limit", "--count", "0"]).status.code(), Some(2));
}

#[test]
fn limit_csv_has_header_and_rows() {
    let out = run(&["limit", "--count", "5", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "index,lambda,bc,nu,k,multiplicity");
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(run(&["coeffs", "--bc", "robin"]).status.code(), Some(2));
    assert_eq!(run(&["limit", "--eps", "0"]).status.code(), Some(2));
    assert_eq!(run(&["coeffs", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--eig", "dirichlet:0"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["limit", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
    // Constant mode is excluded from the coefficient pipeline.
    assert_eq!(run(&["coeffs", "--bc", "neumann", "--nu", "0", "--k", "1"]).status.code(), Some(2));
    let out = bin().args(["limit"]).env("COLLAPSE_SPECTRA_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    // An absurd extrapolation tolerance cannot be met.
    let out = run(&["coeffs", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn coeffs_dirichlet_ground_mode() {
    let report = json(&["coeffs", "--bc", "dirichlet", "--nu", "0", "--k", "1", "--eps", "0.01"]);
    let res = &report["results"];
    assert_eq!(res["multiplicity"], 1);
    let l0 = res["lambda0"][0][0].as_f64().unwrap();
    let l1 = res["lambda1"][0][0].as_f64().unwrap();
    assert!((l0 - 11.566371925893568).abs() < 1e-9, "{l0}");
    assert!((l1 + 6.087108300440226).abs() < 2e-4, "{l1}");
    let row = &rows(&report)[0];
    let mu = row[2].as_f64().unwrap();
    assert!((mu - (l0 + l1 / 0.01f64.ln())).abs() < 1e-12);
}

#[test]
fn coeffs_neumann_pair_is_diagonal() {
    let report = json(&["coeffs", "--bc", "neumann", "--nu", "1", "--k", "1"]);
    let res = &report["results"];
    assert_eq!(res["multiplicity"], 2);
    for key in ["lambda0", "lambda1"] {
        let m = &res[key];
        assert!(m[0][1].as_f64().unwrap().abs() < 1e-10);
        assert!((m[0][0].as_f64().unwrap() - m[1][1].as_f64().unwrap()).abs() < 1e-8);
    }
}

#[test]
fn direct_sphere_table() {
    let report = json(&["direct", "--eps", "1.0", "--mmax", "2", "--count", "9", "--grid-c", "2000"]);
    let got: Vec<f64> = rows(&report).iter().map(|r| r[3].as_f64().unwrap()).collect();
    let want = [0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0];
    assert_eq!(got.len(), 9);
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 1e-5, "{got:?}");
    }
}

#[test]
fn ellipse_residuals_decay() {
    let report = json(&["ellipse", "--k", "1", "--eps", "0.1,0.05,0.025"]);
    let scaled: Vec<f64> = rows(&report).iter().map(|r| r[4].as_f64().unwrap()).collect();
    assert_eq!(scaled.len(), 3);
    assert!(scaled[1] < 0.5 * scaled[0] && scaled[2] < 0.5 * scaled[1], "{scaled:?}");
    let c1 = report["results"]["coefficients"]["c1"].as_f64().unwrap();
    assert!((c1 - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-15);
}

#[test]
fn validate_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "validate",
        "--eig",
        "dirichlet:0:1",
        "--eps",
        "0.04,0.02,0.01",
        "--grid-c",
        "200",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let fit = &report["results"]["report"]["fits"][0];
    assert_eq!(fit["selector"]["bc"], "dirichlet");
    assert_eq!(fit["direct"].as_array().unwrap().len(), 3);
    let flags = report["flags"].as_object().unwrap();
    for key in ["dirichlet:0:1.c1", "dirichlet:0:1.c2", "dirichlet:0:1.remainder", "ellipse.k1", "all_pass"] {
        assert!(flags[key].is_boolean(), "{key}");
    }
    assert_eq!(flags["ellipse.k1"], true);
    assert_eq!(rows(&report).len(), 3);
}

#[test]
fn json_and_csv_carry_identical_numbers() {
    let args = ["ellipse", "--k", "2", "--eps", "0.1,0.03,0.007"];
    let report = json(&args);
    let out = run(&[&args[..], &["--format", "csv"]].concat());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, report["results"]["table"]["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect::<Vec<_>>());
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), rows(&report).len());
    for (rec, row) in records.iter().zip(rows(&report)) {
        for (cell, v) in rec.iter().zip(row.as_array().unwrap()) {
            assert_eq!(cell.parse::<f64>().unwrap().to_bits(), v.as_f64().unwrap().to_bits());
        }
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["direct", "--eps", "0.1,0.2", "--mmax", "3", "--count", "6", "--grid-c", "50"];
    let outputs: Vec<Value> = ["1", "4"]
        .iter()
        .map(|t| {
            let out = bin().args(args).env("COLLAPSE_SPECTRA_THREADS", t).output().unwrap();
            assert!(out.status.success());
            strip_wall_time(serde_json::from_slice(&out.stdout).unwrap())
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let text = |v: &Value| serde_json::to_string(v).unwrap();
    assert_eq!(text(&outputs[0]), text(&strip_wall_time(json(&args))));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, r#"{"count": 3, "format": "csv", "eps": [0.1, 0.05]}"#).unwrap();
    let cfg = path.to_str().unwrap();

    let out = run(&["limit", "--config", cfg]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);

    let report = json(&["limit", "--config", cfg, "--count", "2", "--format", "json"]);
    assert_eq!(rows(&report).len(), 2);
    assert_eq!(report["config"]["eps"], serde_json::json!([0.1, 0.05]));

    fs::write(&path, r#"{"cuont": 3}"#).unwrap();
    assert_eq!(run(&["limit", "--config", cfg]).status.code(), Some(2));
}

#[test]
fn config_file_accepts_polynomial_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    // q(r) = 1 - r², the ellipsoid written as coefficients.
    fs::write(&path, r#"{"profile": {"q_coeffs": [1.0, -1.0]}}"#).unwrap();
    let a = json(&["coeffs", "--config", path.to_str().unwrap(), "--eps", "0.01"]);
    let b = json(&["coeffs", "--eps", "0.01"]);
    assert_eq!(a["results"]["lambda0"], b["results"]["lambda0"]);
    let d = (a["results"]["lambda1"][0][0].as_f64().unwrap() - b["results"]["lambda1"][0][0].as_f64().unwrap()).abs();
    assert!(d < 1e-10);

    fs::write(&path, r#"{"profile": {"q_coeffs": [1.0, 1.0]}}"#).unwrap();
    assert_eq!(run(&["coeffs", "--config", path.to_str().unwrap()]).status.code(), Some(2));
}
