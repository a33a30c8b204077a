use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write_walk(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str], walk: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlharmonic"))
        .args(args)
        .arg("--walk")
        .arg(walk)
        .output()
        .unwrap()
}

fn json_result(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_reports_case_one_for_symmetric_walk() {
    let dir = TempDir::new().unwrap();
    let walk = write_walk(&dir, "sym.json", r#"{"q":2,"r":3,"mu_tilde":{"1":0.5,"-1":0.5}}"#);
    let v = json_result(&run(&["analyze"], &walk));
    assert_eq!(v["result"]["case"], "I");
    assert!(v["result"]["c0"].is_null());
    assert_eq!(v["result"]["drift"].as_f64().unwrap(), 0.0);
}

#[test]
fn analyze_reports_case_two_with_c0() {
    let dir = TempDir::new().unwrap();
    let walk = write_walk(&dir, "drift.json", r#"{"q":2,"r":2,"mu_tilde":{"1":0.7,"-1":0.3}}"#);
    let v = json_result(&run(&["analyze"], &walk));
    assert_eq!(v["result"]["case"], "II");
    let c0 = v["result"]["c0"].as_f64().unwrap();
    assert!((c0 - (3.0f64 / 7.0).ln()).abs() < 1e-10, "{c0}");
}

#[test]
fn malformed_spec_names_the_key() {
    let dir = TempDir::new().unwrap();
    let walk = write_walk(&dir, "bad.json", r#"{"q":2,"r":2,"mu_tilde":{"1":0.7,"-1":"x"}}"#);
    let out = run(&["analyze"], &walk);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mu_tilde.-1"), "{err}");

    let walk = write_walk(&dir, "mass.json", r#"{"q":2,"r":2,"mu_tilde":{"1":0.7,"-1":0.2}}"#);
    let out = run(&["analyze"], &walk);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mu_tilde"));
}

#[test]
fn verify_passes_on_drift_walk() {
    let dir = TempDir::new().unwrap();
    let walk = write_walk(&dir, "w.json", r#"{"q":2,"r":3,"mu_tilde":{"2":0.5,"-1":0.5}}"#);
    let out = run(&["verify", "--samples", "20"], &walk);
    let v = json_result(&out);
    assert_eq!(v["passed"], true);
}

#[test]
fn coeffs_csv_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let walk = write_walk(&dir, "w.json", r#"{"q":2,"r":2,"mu_tilde":{"1":0.7,"-1":0.3}}"#);
    let a = run(&["coeffs", "--format", "csv"], &walk);
    let b = run(&["coeffs", "--format", "csv"], &walk);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# command")));
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let walk = write_walk(&dir, "w.json", r#"{"q":2,"r":2,"mu_tilde":{"1":0.5,"-1":0.5}}"#);
    let target = dir.path().join("out.json");
    let out = run(&["analyze", "--out", target.to_str().unwrap()], &walk);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["command"], "analyze");
}

#[test]
fn martin_at_root_is_identically_one() {
    let dir = TempDir::new().unwrap();
    let walk = write_walk(&dir, "w.json", r#"{"q":2,"r":2,"mu_tilde":{"1":0.7,"-1":0.3}}"#);
    let v = json_result(&run(&["martin", "--n-max", "40"], &walk));
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert!((row["k_hat"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn kernel_at_root_is_one() {
    let dir = TempDir::new().unwrap();
    let walk = write_walk(&dir, "w.json", r#"{"q":2,"r":2,"mu_tilde":{"1":0.7,"-1":0.3}}"#);
    let v = json_result(&run(&["kernel", "--x", r#"{"hor":0}"#, "--xi", r#"{"hor":5}"#], &walk));
    assert!((v["result"]["kernel"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}
