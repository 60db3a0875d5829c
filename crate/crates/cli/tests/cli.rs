use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/corpus")
        .join(name);
    p.to_str().unwrap().to_string()
}

fn mpcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpcc"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = mpcc(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

#[test]
fn check_exit_codes() {
    ok(&["check", &corpus("gcd.hml")]);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("leak.hml");
    std::fs::write(&bad, "parties 1, 2;\ninput x : int from 1;\noutput x;\n").unwrap();
    let out = mpcc(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1);
    assert!(stderr.contains("leak.hml:3:1: error["));
    assert_eq!(
        mpcc(&["check", "/definitely/missing.hml"]).status.code(),
        Some(2)
    );
    assert_eq!(mpcc(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn pow8_estimates() {
    let r = json(&[
        "estimate",
        &corpus("pow8.hml"),
        "--cost-model",
        "arith.json",
    ]);
    assert_eq!(
        (r["gate_counts"]["Mul"].as_u64(), r["depth"].as_u64()),
        (Some(3), Some(3))
    );
    let r = json(&[
        "estimate",
        &corpus("pow8.hml"),
        "--cost-model",
        "arith",
        "--no-opt",
    ]);
    assert_eq!(
        (r["gate_counts"]["Mul"].as_u64(), r["depth"].as_u64()),
        (Some(7), Some(7))
    );
}

#[test]
fn auction_on_shares() {
    let r = json(&[
        "run",
        &corpus("auction.hml"),
        "--backend",
        "shares",
        "-n",
        "3",
        "--inputs",
        &corpus("bids.json"),
    ]);
    assert_eq!(r, serde_json::json!({"winner": 1, "price": 15}));
}

#[test]
fn adder_gate_list() {
    let text = ok(&[
        "emit",
        &corpus("adder.hml"),
        "--level",
        "bool",
        "--bitwidth",
        "4",
    ]);
    assert!(text.starts_with("20 "));
    assert_eq!(mpcc(&["emit", &corpus("adder.hml")]).status.code(), Some(1));
}

#[test]
fn file_pipeline_matches_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let lowered = dir.path().join("c.json");
    let optimized = dir.path().join("o.json");
    let src = corpus("auction.hml");
    ok(&[
        "lower",
        &src,
        "--bitwidth",
        "16",
        "-o",
        lowered.to_str().unwrap(),
    ]);
    ok(&[
        "opt",
        lowered.to_str().unwrap(),
        "-o",
        optimized.to_str().unwrap(),
    ]);
    let via_files = ok(&["estimate", optimized.to_str().unwrap()]);
    assert_eq!(via_files, ok(&["estimate", &src, "--bitwidth", "16"]));
    assert_eq!(
        ok(&["opt", &src, "--bitwidth", "16"]),
        std::fs::read_to_string(&optimized).unwrap()
    );
}

#[test]
fn ranking_and_spec_file() {
    let r = json(&[
        "estimate",
        &corpus("adder.hml"),
        "--cost-model",
        "secret-sharing",
        "--cost-model",
        "boolean",
        "--objective",
        "communication",
    ]);
    let names: Vec<&str> = r["ranking"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["model"].as_str().unwrap())
        .collect();
    assert_eq!(names, vec!["secret-sharing", "boolean"]);

    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"backend": "shares", "parties": 2, "seed": 9}"#).unwrap();
    let r = json(&[
        "run",
        &corpus("gcd.hml"),
        "--spec",
        spec.to_str().unwrap(),
        "--inputs",
        &corpus("gcd.inputs.json"),
        "--bitwidth",
        "32",
    ]);
    assert_eq!(r["r"], 5);
    assert_eq!(
        mpcc(&["run", &corpus("gcd.hml"), "--passes", "cse,bogus"])
            .status
            .code(),
        Some(1)
    );
}
