use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn galrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galrep"))
        .args(args)
        .env_remove("GALREP_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit status")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn verify_bundled_data() {
    let out = galrep(&["verify-data"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["record_count"], 8);
    assert_eq!(report["valid"], true);
    assert_eq!(report["manifest"]["command"], "verify-data");
}

#[test]
fn verify_rejects_impure_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        r#"{"N": 6, "records": [{"p": 5, "a": [50, 0], "b": 0}, {"p": 7, "a": [-4, 3], "b": -189}]}"#,
    );
    let out = galrep(&["verify-data", &path]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("p = 5"), "{err}");
}

#[test]
fn verify_missing_and_malformed_files() {
    assert_eq!(code(&galrep(&["verify-data", "/nonexistent/data.json"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "broken.json", "{\"N\": 6, \"records\": [");
    assert_eq!(code(&galrep(&["verify-data", &path])), 2);
}

#[test]
fn check_conditions_exit_codes() {
    let out = galrep(&["check-conditions"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["pass"], true);

    let dir = tempfile::tempdir().unwrap();
    let rational = write(
        dir.path(),
        "rational.json",
        r#"{"N": 6, "records": [{"p": 5, "a": [3, 0], "b": -5}, {"p": 7, "a": [-4, 0], "b": -189}]}"#,
    );
    let out = galrep(&["check-conditions", &rational]);
    assert_eq!(code(&out), 4);
    let report = json(&out);
    assert_eq!(report["conditions"][5]["pass"], false);
    assert_eq!(report["conditions"][6]["pass"], false);

    let empty = write(dir.path(), "empty.json", r#"{"N": 6, "records": []}"#);
    assert_eq!(code(&galrep(&["check-conditions", &empty])), 4);
}

#[test]
fn sieve_default_run_is_empty_and_deterministic() {
    let a = galrep(&["sieve"]);
    let b = galrep(&["sieve"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let report = json(&a);
    assert_eq!(report["final"], Value::Array(vec![]));
    assert_eq!(report["manifest"]["config"]["conductor"], 1728);
    assert!(report["manifest"].get("elapsed_ms").is_none());
}

#[test]
fn sieve_without_exclusions() {
    let out = galrep(&["sieve", "--no-exclude-d1d2", "--cutoff", "0"]);
    let report = json(&out);
    // 3 divides N, so it never reaches the final set even without exclusions.
    assert_eq!(report["final"], Value::Array(vec![]));
    assert_eq!(code(&out), 0);
    let excluded: Vec<u64> = report["excluded"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["prime"].as_u64().unwrap())
        .collect();
    assert!(excluded.contains(&3));
}

#[test]
fn sieve_conductor_sharing_a_factor() {
    let out = galrep(&["sieve", "--conductor", "35"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn sieve_inconclusive_exit() {
    let dir = tempfile::tempdir().unwrap();
    let single = write(dir.path(), "single.json", r#"{"N": 6, "records": [{"p": 5, "a": [-3, 10], "b": -5}]}"#);
    let out = galrep(&["sieve", &single]);
    assert_eq!(code(&out), 5);
    assert!(!json(&out)["inconclusive"].as_array().unwrap().is_empty());
}

#[test]
fn sieve_labels_with_lmax() {
    let report = json(&galrep(&["sieve", "--lmax", "30"]));
    let labels = report["labels"].as_object().unwrap();
    assert_eq!(labels["19"], "PSL4");
    assert_eq!(labels["23"], "PSU4");
    assert_eq!(labels["13"], "DetSquareSubgroup");
    assert_eq!(labels["3"], "BadReduction");
}

#[test]
fn output_file_and_classify_from_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let path = path.to_str().unwrap();
    let out = galrep(&["sieve", "--output", path]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let saved = std::fs::read(path).unwrap();
    assert_eq!(saved, galrep(&["sieve"]).stdout);

    let out = galrep(&["classify", "--ell", "19", "--report", path]);
    assert_eq!(stdout(&out).trim(), "PSL(4, 19), Galois over ℚ, unramified outside 114");
    let out = galrep(&["classify", "--ell", "23", "--report", path]);
    assert_eq!(stdout(&out).trim(), "PSU(4, 23), Galois over ℚ, unramified outside 138");
    let out = galrep(&["classify", "--ell", "109", "--report", path]);
    assert_eq!(stdout(&out).trim(), "Excluded (D1: 109 ≡ 1 mod 27)");
}

#[test]
fn classify_inline_and_errors() {
    let out = galrep(&["classify", "--ell", "19"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("PSL(4, 19)"));
    assert_eq!(code(&galrep(&["classify", "--ell", "20"])), 2);
    assert_eq!(code(&galrep(&["classify", "--ell", "19", "--report", "/nonexistent.json"])), 2);
}

#[test]
fn oracle_seed_recorded() {
    let out = galrep(&["oracle", "--trials", "50", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["manifest"]["seed"], 7);
    assert_eq!(report["pass"], true);

    let out = Command::new(env!("CARGO_BIN_EXE_galrep"))
        .args(["oracle", "--trials", "20"])
        .env("GALREP_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(json(&out)["manifest"]["seed"], 11);

    let out = Command::new(env!("CARGO_BIN_EXE_galrep"))
        .args(["oracle", "--trials", "20"])
        .env("GALREP_SEED", "eleven")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn timing_is_opt_in() {
    let report = json(&galrep(&["verify-data", "--timing"]));
    assert!(report["manifest"]["elapsed_ms"].is_u64());
}
