//! End to end runs of the binary: exit codes, formats, and piping one
//! verb's document output into another verb.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn ngpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ngpd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ngpd_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ngpd"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .expect("stdin")
        .write_all(input.as_bytes())
        .expect("write");
    child.wait_with_output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8")
}

#[test]
fn a_valid_corpus_groupoid_passes_validation() {
    let out = ngpd(&["validate", "corpus:groupoid/loop-2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), "valid\n");
}

#[test]
fn the_collapse_functor_fails_with_a_named_witness() {
    let out = ngpd(&["equiv", "corpus:functor/collapse-loop-2"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.contains("FAIL"), "verdict missing: {text}");
    assert!(text.contains("faithful"), "witness missing: {text}");
}

#[test]
fn a_nerve_document_round_trips_through_stdin() {
    let nerve = ngpd(&["nerve", "corpus:groupoid/loop-3"]);
    assert_eq!(nerve.status.code(), Some(0));
    let doc = stdout_of(&nerve);
    assert!(doc.contains("\"kind\": \"sset\""), "not an sset document");

    let validated = ngpd_with_stdin(&["validate", "-"], &doc);
    assert_eq!(validated.status.code(), Some(0));
    assert_eq!(stdout_of(&validated), "valid\n");

    let segal = ngpd_with_stdin(&["segal", "-"], &doc);
    assert_eq!(segal.status.code(), Some(0));
}

#[test]
fn json_output_parses_and_carries_a_verdict() {
    let out = ngpd(&["unit-n1", "corpus:groupoid/klein", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("json");
    assert_eq!(value["verdict"], "PASS");
    assert!(value["checks"].as_array().is_some());
}

#[test]
fn a_missing_corpus_name_is_a_usage_error() {
    let out = ngpd(&["validate", "corpus:nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).expect("utf8");
    assert!(err.contains("nosuch"), "stderr names the input: {err}");
}

#[test]
fn unknown_flags_and_missing_verbs_exit_two() {
    assert_eq!(ngpd(&["--bogus"]).status.code(), Some(2));
    assert_eq!(ngpd(&[]).status.code(), Some(2));
    assert_eq!(ngpd(&["pi1", "corpus:two/lift-loop-2"]).status.code(), Some(2));
}

#[test]
fn a_broken_simplicial_document_is_reported_not_crashed() {
    let text = r#"{
  "kind": "sset",
  "metadata": {"name": "broken", "seed": 0, "provenance": "handmade"},
  "payload": {
    "dim_bound": 1,
    "levels": [
      {"cells": ["p", "q"], "maps": {"s:0:0": {"p": "sp", "q": "sq"}}},
      {"cells": ["e", "sp", "sq"], "maps": {
        "d:0:0": {"e": "q", "sp": "p", "sq": "q"},
        "d:0:1": {"e": "p", "sp": "p", "sq": "p"}
      }}
    ]
  }
}"#;
    let out = ngpd_with_stdin(&["validate", "-"], text);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_of(&out);
    assert!(report.contains("violation"), "no violation line: {report}");
}
