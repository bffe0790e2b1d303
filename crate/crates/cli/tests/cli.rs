use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn edist(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edist"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn edist")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("summary is JSON")
}

fn workspace() -> tempfile::TempDir {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("x.csv"), "x0\n0.0\n1.0\n2.0\n").unwrap();
    std::fs::write(tmp.path().join("y.csv"), "x0\n0.5\n1.5\n").unwrap();
    tmp
}

#[test]
fn energy_summary_has_expected_shape() {
    let tmp = workspace();
    let v = json(&edist(tmp.path(), &["energy", "x.csv", "y.csv"]));
    // E_1² = 2·(5/6) − 8/9 − 1/2 for these points
    let e2 = v["result"]["energy_sq"].as_f64().unwrap();
    assert!((e2 - (2.0 * 5.0 / 6.0 - 8.0 / 9.0 - 0.5)).abs() < 1e-14, "{e2}");
    assert_eq!(v["config"]["command"], "energy");
    assert_eq!(v["result"]["n"], 3);
    assert!(v["version"].as_str().unwrap().starts_with("energy-core"));
    assert!(v["config"].get("threads").is_none());
}

#[test]
fn flags_override_config_file() {
    let tmp = workspace();
    std::fs::write(tmp.path().join("c.json"), r#"{"seed": 4, "energy": {"gamma": 0.5, "estimator": "mmd"}}"#).unwrap();
    let v = json(&edist(tmp.path(), &["--config", "c.json", "energy", "x.csv", "y.csv"]));
    assert_eq!(v["config"]["params"]["gamma"], 0.5);
    assert_eq!(v["config"]["params"]["estimator"], "mmd");
    assert_eq!(v["config"]["seed"], 4);
    let v = json(&edist(tmp.path(), &["--config", "c.json", "--seed", "9", "energy", "x.csv", "y.csv", "--gamma", "1.5"]));
    assert_eq!(v["config"]["params"]["gamma"], 1.5);
    assert_eq!(v["config"]["params"]["estimator"], "mmd");
    assert_eq!(v["config"]["seed"], 9);
}

#[test]
fn gamma_out_of_range_is_a_config_error() {
    let tmp = workspace();
    let out = edist(tmp.path(), &["energy", "x.csv", "y.csv", "--gamma", "2.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("energy.gamma"));
}

#[test]
fn unknown_config_key_reports_its_path() {
    let tmp = workspace();
    std::fs::write(tmp.path().join("c.json"), r#"{"slice": {"n_dirs": 5, "ndirs": 3}}"#).unwrap();
    let out = edist(tmp.path(), &["--config", "c.json", "slice", "x.csv", "y.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slice.ndirs"));
}

#[test]
fn unknown_flag_exits_with_usage_error() {
    let tmp = workspace();
    assert_eq!(edist(tmp.path(), &["energy", "--nope"]).status.code(), Some(2));
}

#[test]
fn missing_input_is_a_runtime_error() {
    let tmp = workspace();
    let out = edist(tmp.path(), &["--output-dir", "out", "energy", "x.csv", "absent.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!tmp.path().join("out").join("summary.json").exists());
}

#[test]
fn dimension_mismatch_is_a_runtime_error() {
    let tmp = workspace();
    std::fs::write(tmp.path().join("z.csv"), "x0,x1\n0,0\n1,1\n").unwrap();
    assert_eq!(edist(tmp.path(), &["energy", "x.csv", "z.csv"]).status.code(), Some(1));
}

#[test]
fn fitted_model_feeds_the_stopping_rule() {
    let tmp = workspace();
    let dir = tmp.path();
    let rows: String = (0..200).map(|i| format!("{}\n", (i as f64 * 0.37).sin() * 0.5 + 1.0)).collect();
    std::fs::write(dir.join("d.csv"), format!("x0\n{rows}")).unwrap();
    let out = edist(dir, &["--output-dir", "fit", "fit", "d.csv", "--steps", "40"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    for f in ["summary.json", "model.json", "trace.csv"] {
        assert!(dir.join("fit").join(f).exists(), "{f}");
    }
    let trace = std::fs::read_to_string(dir.join("fit/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 41);
    std::fs::write(
        dir.join("s.json"),
        r#"{"stop": {"candidates": [{"kind": "model-file", "path": "fit/model.json"}], "tau": 100.0}}"#,
    )
    .unwrap();
    let v = json(&edist(dir, &["--config", "s.json", "stop", "d.csv"]));
    assert_eq!(v["result"]["report"]["stopped_at"], 1);
    assert_eq!(v["result"]["report"]["schedule"][0], 200);
}

#[test]
fn output_dir_receives_csv_tables() {
    let tmp = workspace();
    let out = edist(tmp.path(), &["--output-dir", "o", "rates", "discrete", "--k", "4", "--n-list", "50,100", "--trials", "5"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(tmp.path().join("o/rates.csv")).unwrap();
    assert!(csv.starts_with("row,n,trials,"));
    assert!(csv.lines().last().unwrap().starts_with("slope,"));
}
