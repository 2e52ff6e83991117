use std::path::Path;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecstream")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn generate_learn_evaluate_audit() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = (path(dir.path(), "train.facts"), path(dir.path(), "test.facts"));
    let (theory, log, metrics) = (path(dir.path(), "t.lp"), path(dir.path(), "run.log"), path(dir.path(), "m.jsonl"));
    let gt = data("moving_gt.lp");
    let bias = data("moving.mode");
    assert!(run(&["gen", "--gt", &gt, "--length", "3000", "--gen-seed", "5", "--out", &train]).status.success());
    assert!(run(&["gen", "--gt", &gt, "--length", "1000", "--gen-seed", "6", "--out", &test]).status.success());

    let out = run(&[
        "learn", "--train", &train, "--test", &test, "--bias", &bias, "--target", "moving", "--warmup", "200",
        "--out", &theory, "--log", &log, "--metrics", &metrics,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&theory).unwrap();
    assert!(text.starts_with("% size: "));
    let summary: serde_json::Value = serde_json::from_str(std::fs::read_to_string(&metrics).unwrap().trim()).unwrap();
    assert_eq!(summary["record"], "summary");
    for key in ["tp", "fp", "fn", "precision", "recall", "f1", "theory_size", "train_time"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }

    let out = run(&["eval", "--theory", &gt, "--test", &test, "--bias", &bias, "--target", "moving"]);
    let m: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(m["f1"], 1.0);

    let out = run(&["audit", "--log", &log]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(" 0 violations"));

    let out = run(&["cv", "--train", &train, "--folds", "3", "--bias", &bias, "--target", "moving", "--warmup", "200"]);
    let lines: Vec<serde_json::Value> =
        String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[2]["fold"], 2);
    assert_eq!(lines[3]["record"], "summary");
}

#[test]
fn tampered_log_fails_audit() {
    let dir = tempfile::tempdir().unwrap();
    let log = path(dir.path(), "bad.log");
    let record = r#"{"event":"prune","learner":"initiated","interp":3,"clause_id":0,"delta":1e-5,"s_min":0.5,"stats":{"n":1000,"tp":90,"fp":10,"fn":0,"g":0.9},"epsilon":0.0759,"clause":"initiatedAt(moving(X0,X1),T)."}"#;
    std::fs::write(&log, format!("{record}\n")).unwrap();
    let out = run(&["audit", "--log", &log]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn bad_input_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let facts = path(dir.path(), "bad.facts");
    std::fs::write(&facts, "happensAt(walking(a),1).\nhappensAt(walking(a),).\n").unwrap();
    let out = run(&["learn", "--train", &facts, "--bias", &data("moving.mode"), "--target", "moving"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":2:"), "{err}");
}
