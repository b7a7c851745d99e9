//! End-to-end checks of the binary: exit codes, report schema, and
//! seed-reproducibility.

use std::process::{Command, Output};

fn lifton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lifton"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let start = text.find('{').expect("report on stdout");
    serde_json::from_str(&text[start..]).expect("valid JSON report")
}

#[test]
fn check_lemma_passes_with_exit_zero() {
    let out = lifton(&[
        "check-lemma",
        "covvgood",
        "--n",
        "2",
        "--samples",
        "1000",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["command"], "check-lemma");
    assert_eq!(report["samples"], 1000);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["failures"].as_array().unwrap().len(), 0);
    for key in ["command", "params", "samples", "failures", "seed", "elapsed_ms"] {
        assert!(report.get(key).is_some(), "missing report field {key}");
    }
}

#[test]
fn same_seed_gives_identical_reports() {
    let mut first = stdout_json(&lifton(&[
        "check-lemma", "prgood", "--n", "3", "--samples", "200", "--seed", "99",
    ]));
    let mut second = stdout_json(&lifton(&[
        "check-lemma", "prgood", "--n", "3", "--samples", "200", "--seed", "99",
    ]));
    first["elapsed_ms"] = 0.into();
    second["elapsed_ms"] = 0.into();
    assert_eq!(
        serde_json::to_string(&first).unwrap(),
        serde_json::to_string(&second).unwrap()
    );
}

#[test]
fn usage_errors_exit_two() {
    let out = lifton(&["check-lemma", "no-such-lemma"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lifton(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lifton(&["encode-tree", "--tree", "Tr(nil;one)"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lifton(&["eval", "--formula", "g(0) ="]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn demo_llpo_prints_the_certificate_tree() {
    let out = lifton(&["demo", "llpo", "--n", "2", "--one-at", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.lines().next() == Some("Tr(nil,nil;one,zf:2)"),
        "unexpected first line in {text}"
    );
}

#[test]
fn encode_tree_reports_bounds() {
    let out = lifton(&["encode-tree", "--tree", "nil"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["result"]["shape"], "0");
    assert_eq!(report["result"]["good_bound"], 0);
    assert_eq!(report["result"]["vgood_bound"], 0);

    let out = lifton(&["encode-tree", "--tree", "Tr(nil,nil;one,zf:2)"]);
    let report = stdout_json(&out);
    assert_eq!(report["result"]["shape"], "3");
    assert_eq!(report["result"]["good_bound"], 2);
    assert_eq!(report["result"]["stabilization_bound"], 3);
    assert_eq!(report["result"]["clauses"].as_array().unwrap().len(), 2);
}

#[test]
fn eval_reports_status_and_certificate() {
    let out = lifton(&[
        "eval",
        "--n",
        "2",
        "--fuel",
        "100",
        "--def",
        "g=unit@5",
        "--formula",
        "(forall x. g(2*x)=0) \\/ (forall x. g(2*x+1)=0)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["result"]["status"], "proven");
    assert_eq!(report["result"]["certificate"], "Tr(nil,nil;one,zf:2)");

    let out = lifton(&[
        "eval",
        "--n",
        "2",
        "--fuel",
        "100",
        "--def",
        "g=const@0",
        "--formula",
        "exists x. g(x) = 1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["result"]["status"], "unknown");
    assert_eq!(report["result"]["fuel_spent"], 100);
}

#[test]
fn demos_run_clean() {
    for demo in ["dovetail", "k2"] {
        let out = lifton(&["demo", demo]);
        assert_eq!(out.status.code(), Some(0), "demo {demo}");
    }
}
