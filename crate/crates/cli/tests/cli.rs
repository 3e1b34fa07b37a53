use std::path::PathBuf;
use std::process::{Command, Output};

use fhmdp::dataset;
use fhmdp::io::JsonReport;
use fhmdp::oracle::enumerate_optimal;
use fhmdp::Horizon;

fn fhmdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fhmdp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn solve_drilling_table() {
    let o = fhmdp(&[
        "solve",
        "--model",
        "drilling",
        "--horizon",
        "10",
        "--format",
        "table",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stderr.is_empty());
    let text = stdout(&o);
    let v1 = text
        .lines()
        .find(|l| l.trim_start().starts_with("v_1(n)"))
        .unwrap();
    assert!(v1.contains("89233.3") && v1.contains("7430.09"));
    let d4: Vec<&str> = text
        .lines()
        .find(|l| l.trim_start().starts_with("d_4(n)"))
        .unwrap()
        .split_whitespace()
        .collect();
    assert_eq!(
        d4[1..],
        ["2", "2", "2", "2", "2", "2", "2", "2", "2", "1", "-"]
    );
}

#[test]
fn solve_zero_horizon_prints_terminal_zeros() {
    let o = fhmdp(&[
        "solve",
        "--model",
        "drilling",
        "--horizon",
        "0",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[1..].iter().all(|l| l.ends_with(",0.0,")));
}

#[test]
fn solve_toy3_json_matches_enumeration() {
    let o = fhmdp(&[
        "solve",
        "--model",
        "toy3",
        "--horizon",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: JsonReport = serde_json::from_slice(&o.stdout).unwrap();
    let en = enumerate_optimal(&dataset::toy3(), Horizon(3)).unwrap();
    for (a, b) in report.values[0].iter().zip(en.value_table.row(0)) {
        assert!((a - b).abs() <= 1e-9);
    }
}

#[test]
fn terminal_values_file() {
    let t = temp_file("terminal.toml", "terminal_values = [1.0, 2.0, 3.0]\n");
    let o = fhmdp(&[
        "solve",
        "--model",
        "toy3",
        "--horizon",
        "0",
        "--format",
        "csv",
        "--terminal-values",
        t.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0,3,3.0,"));

    let bad = temp_file("terminal_short.toml", "terminal_values = [1.0]\n");
    let o = fhmdp(&[
        "solve",
        "--model",
        "toy3",
        "--terminal-values",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_bundled_fixtures() {
    for fixture in ["drilling-final", "drilling-stagewise"] {
        let o = fhmdp(&["check", "--model", "drilling", "--expected", fixture]);
        assert_eq!(o.status.code(), Some(0), "{fixture}: {}", stdout(&o));
    }
}

#[test]
fn check_flags_flipped_decision() {
    let text = dataset::DRILLING_FINAL.replace(
        "[2, 2, 2, 1, 2, 2, 2, 1, 2, 2],  # n = 9",
        "[2, 2, 2, 2, 2, 2, 2, 1, 2, 2],  # n = 9",
    );
    assert_ne!(text, dataset::DRILLING_FINAL);
    let path = temp_file("flipped.toml", &text);
    let o = fhmdp(&[
        "check",
        "--model",
        "drilling",
        "--expected",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("d_4(9): expected 2, got 1"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn check_flags_value_off_by_ten_tolerances() {
    // 89233.2 + 10 * 0.5
    let text = dataset::DRILLING_FINAL.replacen("[89233.2,", "[89238.2,", 1);
    let path = temp_file("value_off.toml", &text);
    let o = fhmdp(&[
        "check",
        "--model",
        "drilling",
        "--expected",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("v_1(0)"));
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate",
        "--model",
        "drilling",
        "--start",
        "1",
        "--start",
        "9",
        "--episodes",
        "2000",
        "--seed",
        "11",
        "--format",
        "csv",
    ];
    let a = fhmdp(&args);
    let b = fhmdp(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 3);

    let other = fhmdp(&[
        "simulate",
        "--model",
        "drilling",
        "--start",
        "1",
        "--episodes",
        "2000",
        "--seed",
        "12",
        "--format",
        "csv",
    ]);
    assert_ne!(stdout(&other).lines().nth(1), stdout(&a).lines().nth(1));
}

#[test]
fn simulate_with_policy_file() {
    let p = temp_file("toy_policy.toml", "decisions = [[1, 1, 1], [2, 3, 1]]\n");
    let o = fhmdp(&[
        "simulate",
        "--model",
        "toy3",
        "--horizon",
        "2",
        "--policy",
        p.to_str().unwrap(),
        "--episodes",
        "500",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);

    let o = fhmdp(&[
        "simulate",
        "--model",
        "toy3",
        "--start",
        "4",
        "--episodes",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = fhmdp(&["simulate", "--model", "toy3", "--episodes", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_random_and_toy() {
    let o = fhmdp(&["verify", "--random", "20", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 20);
    let o = fhmdp(&["verify", "--model", "toy3", "--horizon", "3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_drilling_is_too_large() {
    let o = fhmdp(&["verify", "--model", "drilling"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("too large"));
}

#[test]
fn verify_forced_policy() {
    let model = temp_file(
        "single.toml",
        "format_version = \"1\"\n[[states]]\n[[states.actions]]\nreward = 3.25\ntransitions = [{ to_state = 1, probability = 1.0 }]\n",
    );
    let o = fhmdp(&[
        "verify",
        "--model",
        model.to_str().unwrap(),
        "--horizon",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("v(0) = [6.5]"), "{}", stdout(&o));
}

#[test]
fn invalid_model_exits_2_with_diagnostic() {
    let model = temp_file(
        "bad_row.toml",
        "format_version = \"1\"\n[[states]]\n[[states.actions]]\nreward = 1.0\ntransitions = [{ to_state = 1, probability = 0.9 }]\n",
    );
    let o = fhmdp(&["solve", "--model", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("state 1, action 1") && err.contains("0.9"),
        "{err}"
    );

    let o = fhmdp(&["solve", "--model", "no-such-model"]);
    assert_eq!(o.status.code(), Some(2));

    let o = fhmdp(&[
        "solve",
        "--model",
        model.to_str().unwrap(),
        "--row-check",
        "renormalize",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(fhmdp(&["solve"]).status.code(), Some(2));
    assert_eq!(
        fhmdp(&["verify", "--model", "toy3", "--random", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fhmdp(&["solve", "--model", "toy3", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}
