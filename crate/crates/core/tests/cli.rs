//! Round trips through the `regbip` binary.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn regbip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regbip")).args(args).output().unwrap()
}

fn regbip_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_regbip"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_decompose_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k64.edges");
    let dec = dir.path().join("dec.json");
    let trace = dir.path().join("trace.json");
    assert_eq!(regbip(&["generate", "complete:n=64", "--out", s(&graph)]).status.code(), Some(0));
    let out = regbip(&["decompose", "--in", s(&graph), "--mode", "practical", "--seed", "1", "--out", s(&dec), "--trace", s(&trace)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(&dec).unwrap()).unwrap();
    assert_eq!(json["verified"], true);
    assert_eq!(json["seed"], 1);
    assert!(json["timestamp"].is_string());
    let t: serde_json::Value = serde_json::from_slice(&fs::read(&trace).unwrap()).unwrap();
    assert!(t["stages"].as_array().is_some_and(|a| !a.is_empty()));
    let out = regbip(&["verify", "--graph", s(&graph), "--dec", s(&dec)]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verified"], true);
}

#[test]
fn tampered_decomposition_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.edges");
    let dec = dir.path().join("dec.json");
    regbip(&["generate", "complete:n=16", "--out", s(&graph)]);
    assert_eq!(regbip(&["decompose", "--in", s(&graph), "--out", s(&dec)]).status.code(), Some(0));
    let mut json: serde_json::Value = serde_json::from_slice(&fs::read(&dec).unwrap()).unwrap();
    json["parts"][0]["edges"].as_array_mut().unwrap().pop();
    fs::write(&dec, json.to_string()).unwrap();
    let out = regbip(&["verify", "--graph", s(&graph), "--dec", s(&dec)]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["report"]["edge_partition_ok"], false);
    fs::write(&dec, "not json").unwrap();
    assert_eq!(regbip(&["verify", "--graph", s(&graph), "--dec", s(&dec)]).status.code(), Some(1));
}

#[test]
fn identical_runs_are_byte_identical_without_timestamp() {
    let graph = regbip(&["generate", "random_regular:n=64,d=32,seed=2"]).stdout;
    let args = ["decompose", "--in", "-", "--seed", "5", "--no-timestamp"];
    let a = regbip_stdin(&args, &graph);
    let b = regbip_stdin(&args, &graph);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes_for_usage_and_stage_errors() {
    assert_eq!(regbip(&["decompose"]).status.code(), Some(2));
    assert_eq!(regbip(&["decompose", "--in", "/nonexistent/graph"]).status.code(), Some(2));
    let out = regbip_stdin(&["decompose", "--in", "-", "--mode", "strict"], b"4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage parameters"));
    let out = regbip_stdin(&["certify", "--in", "-"], b"3 1\n0 0\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn factorize_complete_graph() {
    let graph = regbip(&["generate", "complete:n=8"]).stdout;
    let out = regbip_stdin(&["factorize", "--in", "-", "--no-timestamp"], &graph);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["count"], 7);
    assert_eq!(json["verified"], true);
}

#[test]
fn certify_reports_unsatisfied_budget() {
    let graph = regbip(&["generate", "complete:n=6"]).stdout;
    let out = regbip_stdin(&["certify", "--in", "-", "--budget", "0.0833"], &graph);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["satisfied"], false);
    assert!((json["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn bench_writes_fixed_header() {
    let out = regbip(&["bench", "--kind", "complete", "--n", "8,16", "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], regbip::cli::BENCH_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("8,7,practical,") && lines[1].ends_with(",true"));
    assert!(lines[2].starts_with("16,15,practical,"));
}

#[test]
fn probe_on_small_random_graph() {
    let graph = regbip(&["generate", "random_regular:n=200,d=40,seed=4"]).stdout;
    let out = regbip_stdin(&["probe", "--in", "-", "--trials", "20", "--no-timestamp"], &graph);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["report"]["trials"], 20);
    assert_eq!(json["quarter"]["sides"][0], json["quarter"]["sides"][1]);
    let ok = json["report"]["successes"] == 20;
    assert_eq!(out.status.code(), Some(if ok { 0 } else { 1 }));
}
