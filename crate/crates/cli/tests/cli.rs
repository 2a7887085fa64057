use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cotlar-lab")).args(args).env_remove("COTLAR_LAB_THREADS").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn strip_elapsed(mut v: Value) -> Value {
    match &mut v {
        Value::Array(items) => items.iter_mut().for_each(|x| *x = strip_elapsed(x.take())),
        Value::Object(obj) => {
            obj.remove("elapsed_ms");
        }
        _ => {}
    }
    v
}

#[test]
fn passing_run_exits_zero_with_full_document() {
    let out = lab(&["verify-cotlar", "--n", "2", "--bound", "1", "--pair-budget", "20000", "--word-pairs", "5000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["check", "config", "total_checked", "violations", "witness", "elapsed_ms", "version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["check"], "cotlar");
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["config"]["word_pairs"], 5000);
    assert!(v["total_checked"].as_u64().unwrap() >= 20_000);
}

#[test]
fn failing_run_exits_one_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("b3.json");
    let path = report.to_str().unwrap();
    let out = lab(&["verify-theorem-b", "--n", "3", "--kind", "max", "--bound", "1", "--output", path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(!doc["violations"].as_array().unwrap().is_empty());

    let out = lab(&["replay", path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = json(&out);
    assert!(rows.as_array().unwrap().iter().all(|r| r["matches"] == true));
}

#[test]
fn tampered_report_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("w.json");
    let path = report.to_str().unwrap();
    assert_eq!(lab(&["counterexample-bianchi", "--output", path]).status.code(), Some(0));
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(doc["witness"].is_object());
    doc["witness"]["observed"]["residual"] = Value::from(5);
    std::fs::write(&report, doc.to_string()).unwrap();
    assert_eq!(lab(&["replay", path]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lab(&["verify-theorem-b", "--n", "5", "--kind", "max"]).status.code(), Some(2));
    assert_eq!(lab(&["verify-cotlar", "--n", "0"]).status.code(), Some(2));
    assert_eq!(lab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(lab(&["replay", "/nonexistent/report.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(lab(&["replay", junk.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let base = ["verify-invariance", "--n", "5", "--bound", "1", "--samples", "3000", "--seed", "11"];
    let runs: Vec<Value> = ["1", "4", "8"]
        .into_iter()
        .map(|t| {
            let mut args = base.to_vec();
            args.extend(["--threads", t]);
            let out = lab(&args);
            assert_eq!(out.status.code(), Some(0));
            strip_elapsed(json(&out))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
    assert_eq!(runs[0].as_array().unwrap().len(), 4);
}

#[test]
fn enumerate_counts_the_box() {
    let v = json(&lab(&["enumerate", "--n", "2", "--bound", "2"]));
    assert_eq!(v["count"], 582);
    assert_eq!(v["elements"].as_array().unwrap().len(), 582);
    let text = lab(&["enumerate", "--n", "2", "--bound", "2", "--format", "text"]);
    assert_eq!(String::from_utf8(text.stdout).unwrap().lines().count(), 582);
}

#[test]
fn csv_and_text_formats() {
    let args = ["verify-proof-terms", "--n", "2", "--bound", "1", "--pairs", "200"];
    let csv = lab(&[&args[..], &["--format", "csv"]].concat());
    assert_eq!(csv.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(&csv.stdout[..]);
    assert_eq!(reader.headers().unwrap().get(0), Some("check"));
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "proof-terms");
    assert_eq!(&rows[0][1], "true");

    let text = lab(&[&args[..], &["--format", "text"]].concat());
    assert!(String::from_utf8(text.stdout).unwrap().starts_with("PASS proof-terms:"));
}
