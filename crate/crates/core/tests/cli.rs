mod common;

use std::io::Write;
use std::process::{Command, Output};

use common::corpus_dir;
use serde_json::Value;

fn goto_interval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goto-interval")).args(args).output().expect("binary runs")
}

fn corpus_file(name: &str) -> String {
    corpus_dir().join(format!("{name}.goto")).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn fig1_annotated_assert_line() {
    let o = goto_interval(&["run", &corpus_file("fig1"), "--domain", "integer", "--arithmetic", "--emit", "annotated"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let assert_line = out.lines().find(|l| l.starts_with("assert")).unwrap();
    assert!(assert_line.ends_with("# x : [100, 100]"), "{assert_line}");
    assert!(out.contains("# assert at statement 7: proven"));
}

#[test]
fn fig5_optimized_output() {
    let o = goto_interval(&["run", &corpus_file("fig5"), "--arithmetic", "--optimize", "--emit", "optimized"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "assert 1"));
}

#[test]
fn wraparound_exits_4_with_counterexample() {
    let o = goto_interval(&["run", &corpus_file("wrap"), "--oracle", "exhaustive"]);
    assert_eq!(o.status.code(), Some(4));
    let err = String::from_utf8_lossy(&o.stderr);
    let line = err.lines().find(|l| l.starts_with("counterexample: ")).unwrap();
    let v: Value = serde_json::from_str(line.trim_start_matches("counterexample: ")).unwrap();
    assert_eq!(v["env"]["x"], 7);
    assert_eq!(v["failed_at"], 3);
}

#[test]
fn parse_error_exits_1_with_position() {
    let mut f = tempfile::Builder::new().suffix(".goto").tempfile().unwrap();
    writeln!(f, "decl x : s8\nx := y + 1").unwrap();
    let o = goto_interval(&["run", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));
}

#[test]
fn missing_file_exits_1() {
    let o = goto_interval(&["run", "/nonexistent/nothing.goto"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn iteration_cap_exits_2() {
    let o = goto_interval(&["run", &corpus_file("fig1_1000"), "--arithmetic", "--iteration-cap", "50"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn refuted_assert_exits_4() {
    let o = goto_interval(&["run", &corpus_file("refuted"), "--arithmetic"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("refuted"));
}

#[test]
fn report_json_is_deterministic_and_complete() {
    let args = [
        "run",
        &corpus_file("nested"),
        "--arithmetic",
        "--widening",
        "--optimize",
        "--instrument",
        "guard-local",
        "--emit",
        "report-json",
    ];
    let a = goto_interval(&args);
    let b = goto_interval(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    for mode in ["full_copy", "shared_interval", "shared_domain_cow"] {
        assert!(v["stats"]["memory"][mode]["interval_objects"].is_u64(), "{mode}");
    }
    assert!(v["stats"]["pops"].as_u64().unwrap() > 0);
    assert!(v["domain_map"].is_array() && v["asserts"].is_array());
}

#[test]
fn timings_only_when_requested() {
    let o = goto_interval(&["run", &corpus_file("fig1"), "--emit", "report-json", "--timings"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["stats"]["timings_ms"]["analysis"].is_f64());
}

#[test]
fn composable_emit_targets() {
    let o = goto_interval(&["run", &corpus_file("fig5"), "--arithmetic", "--optimize", "--emit", "annotated", "--emit", "optimized"]);
    let out = stdout(&o);
    assert!(out.contains("# a : [4, 6]"));
    assert!(out.lines().any(|l| l == "assert 1"));
}

#[test]
fn unknown_flag_values_are_rejected() {
    let o = goto_interval(&["run", &corpus_file("fig1"), "--domain", "octagon"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(goto_interval(&["--help"]).status.code(), Some(0));
}
