//! End-to-end tests of the `zetamill` binary: output shape, exit codes and
//! seed determinism.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn zetamill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetamill")).args(args).output().expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("every stdout line is JSON"))
        .collect()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn moment_of_calabi_yau_family() {
    let out = zetamill(&["moment", "--cy", "2", "--q", "7", "--d", "1", "--kmax", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("36") && text.contains("2304"), "{text}");
}

#[test]
fn count_from_problem_file() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(
        dir.path(),
        "line.json",
        &serde_json::json!({"field": {"p": 5, "k": 1}, "nvars": 2, "poly": "x1 + x2 + 1"}),
    );
    let out = zetamill(&["count", "--problem", &problem, "--q", "5", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    // x1 + x2 + 1 = 0 on the torus over F_5: x1 ∉ {0, -1}, giving 3 points.
    assert_eq!(lines(&out)[0]["value"], 3);
}

#[test]
fn hodge_of_reflexive_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "tri.json", &serde_json::json!({"n": 2, "vertices": [[1, 0], [0, 1], [-1, -1]]}));
    let out = zetamill(&["hodge", "--polytope", &poly]);
    assert_eq!(out.status.code(), Some(0));
    let v = &lines(&out)[0]["hodge"];
    assert_eq!(v["d"], 3);
    assert_eq!(v["h"], serde_json::json!([1, 1, 1]));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("np.jsonl");
    let out = zetamill(&["np", "--coeffs", "1,-20,343", "--q", "7", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(target).unwrap();
    let v: Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["slopes"][1]["slope"], "3/1");
}

#[test]
fn gnp_is_deterministic_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "sq.json", &serde_json::json!({"n": 2, "vertices": [[0, 0], [1, 0], [0, 1], [1, 1]]}));
    let args = [
        "gnp", "--polytope", &poly, "--p", "3", "--trials", "6", "--extension", "1", "--regularity-bound", "2",
        "--seed", "11",
    ];
    let a = zetamill(&args);
    let b = zetamill(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    // Unknown subcommand: usage error.
    assert_eq!(zetamill(&["frobnicate"]).status.code(), Some(2));
    // Too few counts for the requested order.
    let dir = tempfile::tempdir().unwrap();
    let problem = write(
        dir.path(),
        "cubic.json",
        &serde_json::json!({"field": {"p": 7, "k": 1}, "nvars": 2, "poly": "x1 + x2 + x1^-1*x2^-1 - 1"}),
    );
    let insufficient = zetamill(&["zeta", "--problem", &problem, "--q", "7", "--kmax", "2", "--max-order", "6"]);
    assert_eq!(insufficient.status.code(), Some(2));
    let err: Value = serde_json::from_slice(insufficient.stderr.trim_ascii()).expect("stderr carries JSON");
    assert_eq!(err["exit_code"], 2);
    // Enumeration above the cap.
    let capped = zetamill(&["moment", "--cy", "2", "--q", "7", "--d", "3", "--kmax", "2", "--cap", "1000"]);
    assert_eq!(capped.status.code(), Some(3));
}
