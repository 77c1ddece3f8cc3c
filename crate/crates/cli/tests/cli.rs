//! End-to-end command-line tests: determinism, file round trips, and exit
//! codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hopfcw"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hopfcw-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn enumerate_prints_five_pairs_in_dimension_two() {
    let out = run(&["vey", "enumerate", "--n", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pairs"].as_array().unwrap().len(), 5);
    assert_eq!(v["version"], 1);
}

#[test]
fn build_is_deterministic_and_verifies_from_file() {
    let dir = tmpdir("roundtrip");
    let path = dir.join("gv.json");
    let args = [
        "cocycle", "build", "--n", "1", "--i", "1", "--j", "1", "--model", "bott", "--out",
        path.to_str().unwrap(),
    ];
    assert!(run(&args).status.success());
    let first = std::fs::read(&path).unwrap();
    assert!(run(&args).status.success());
    let second = std::fs::read(&path).unwrap();
    assert_eq!(first, second, "build output not byte-identical");

    let cert_path = dir.join("cert.json");
    let out = run(&[
        "cocycle", "verify", "--file", path.to_str().unwrap(), "--trials", "10", "--seed", "7",
        "--out", cert_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "verification of the shipped cocycle");
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    assert_eq!(cert["status"], "PASS");
    // identical seeds give byte-identical certificates
    let cert2_path = dir.join("cert2.json");
    assert!(run(&[
        "cocycle", "verify", "--file", path.to_str().unwrap(), "--trials", "10", "--seed", "7",
        "--out", cert2_path.to_str().unwrap(),
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&cert_path).unwrap(), std::fs::read(&cert2_path).unwrap());
}

#[test]
fn mutated_file_fails_with_nonzero_exit() {
    let dir = tmpdir("mutation");
    let path = dir.join("gv.json");
    assert!(run(&[
        "cocycle", "build", "--n", "1", "--i", "1", "--j", "1", "--out",
        path.to_str().unwrap(),
    ])
    .status
    .success());
    // bump one serialized coefficient
    let text = std::fs::read_to_string(&path).unwrap();
    let mutated = text.replacen("\"1*l^2\"", "\"2*l^2\"", 1);
    assert_ne!(text, mutated, "expected a coefficient to rewrite");
    let bad_path = dir.join("bad.json");
    std::fs::write(&bad_path, mutated).unwrap();
    let out = run(&["cocycle", "verify", "--file", bad_path.to_str().unwrap(), "--trials", "5"]);
    assert_eq!(out.status.code(), Some(1), "mutated cocycle must fail verification");
    let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["status"], "FAIL");
    assert!(!cert["failures"].as_array().unwrap().is_empty());
}

#[test]
fn ce_model_build_contains_only_second_order_symbols() {
    let out = run(&["cocycle", "build", "--n", "1", "--i", "1", "--j", "1", "--model", "ce"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["model"], "ce");
    // the jet symbols appearing are exactly the second-order ones
    assert!(text.contains("e:1:11:"), "expected the lowest jet coordinate");
    assert!(!text.contains("e:1:11:1"), "no higher jets may appear");
}

#[test]
fn verify_ce_model_from_file() {
    let dir = tmpdir("ce");
    let path = dir.join("kappa.json");
    assert!(run(&[
        "cocycle", "build", "--n", "1", "--i", "1", "--j", "1", "--model", "ce", "--out",
        path.to_str().unwrap(),
    ])
    .status
    .success());
    let out = run(&["cocycle", "verify", "--file", path.to_str().unwrap(), "--trials", "8"]);
    assert!(out.status.success());
}

#[test]
fn usage_errors_exit_with_two() {
    let out = run(&["cocycle", "verify", "--file", "/nonexistent/x.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["vey", "enumerate", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["hopf", "coproduct", "--n", "1", "--gen", "Q9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hopf_coproduct_shows_leibniz_term() {
    let out = run(&["hopf", "coproduct", "--n", "1", "--gen", "X1", "--latex"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // three terms: X (x) 1, 1 (x) X, D (x) Y
    assert_eq!(v["coproduct"]["terms"].as_array().unwrap().len(), 3);
    assert!(v["latex"].as_str().unwrap().contains("\\delta"));
}

#[test]
fn selftest_section_and_determinism() {
    let out1 = run(&["selftest", "--seed", "7", "--section", "vey"]);
    assert!(out1.status.success());
    let out2 = run(&["selftest", "--seed", "7", "--section", "vey"]);
    assert_eq!(out1.stdout, out2.stdout, "selftest report not reproducible");
    assert!(String::from_utf8_lossy(&out1.stdout).contains("[PASS] vey"));
}
