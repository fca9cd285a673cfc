use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn l1tv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l1tv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = l1tv(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Data lines of a CSV output.
fn body(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn bounds_table_has_the_six_cells_at_both_ratios() {
    let csv = ok(&["bounds-table"]);
    assert!(csv.starts_with("# command: bounds-table\n# config: {"));
    let lines = body(&csv);
    assert!(lines[0].starts_with("ratio,n,s_r,s_g,"));
    assert_eq!(lines.len(), 13);
    let json: serde_json::Value = serde_json::from_str(&ok(&["bounds-table", "--format", "json"])).unwrap();
    assert_eq!(json["command"], "bounds-table");
    assert_eq!(json["rows"].as_array().unwrap().len(), 12);
}

#[test]
fn output_header_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    ok(&[
        "gen",
        "--n",
        "80",
        "--s-r",
        "12",
        "--blocks",
        "1",
        "--count",
        "2",
        "--seed",
        "9",
        "--out",
        path(&first),
    ]);
    let again = ok(&["gen", "--config", path(&first)]);
    assert_eq!(fs::read_to_string(&first).unwrap(), again);
    // a flag overrides the loaded config
    let other = ok(&["gen", "--config", path(&first), "--seed", "10"]);
    assert_ne!(body(&other), body(&again));
    // a config from another command is refused
    let out = l1tv(&["phase", "--config", path(&first)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_then_solve_recovers_the_signal() {
    let dir = tempfile::tempdir().unwrap();
    let signal = dir.path().join("x.csv");
    ok(&[
        "gen",
        "--n",
        "100",
        "--s-r",
        "20",
        "--blocks",
        "2",
        "--seed",
        "3",
        "--out",
        path(&signal),
    ]);
    for method in ["pgm", "admm", "reference"] {
        let out = l1tv(&[
            "solve",
            "--input",
            path(&signal),
            "--ratio",
            "0.7",
            "--method",
            method,
            "--lambda1",
            "0.001",
            "--lambda2",
            "0.001",
            "--max-iter",
            "100000",
            "--format",
            "json",
        ]);
        assert!(
            out.status.success(),
            "{method}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let rows = json["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 100);
        let (mut num, mut den) = (0.0, 0.0);
        for r in rows {
            let (t, e) = (r["truth"].as_f64().unwrap(), r["estimate"].as_f64().unwrap());
            num += (t - e) * (t - e);
            den += t * t;
        }
        assert!((num / den).sqrt() < 0.05, "{method}");
    }
}

#[test]
fn usage_and_config_errors_exit_with_two() {
    assert_eq!(l1tv(&["width-mc", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(l1tv(&["solve", "--input", "/nonexistent/x.csv"]).status.code(), Some(2));
    assert_eq!(l1tv(&["bounds-table", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(l1tv(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(l1tv(&["train"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_catches_an_injected_fault() {
    let args = ["verify", "--kkt-trials", "50", "--grad-instances", "3"];
    let out = l1tv(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["rows"].as_array().unwrap().iter().all(|r| r["passed"] == true));

    let mut bad = args.to_vec();
    bad.push("--inject-fault");
    let out = l1tv(&bad);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr
            .lines()
            .any(|l| l.starts_with("FAIL") && l.contains("grad_check")),
        "{stderr}"
    );
}

#[test]
fn train_then_eval_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let models = dir.path().join("models");
    ok(&[
        "train",
        "--n",
        "20",
        "--m",
        "10",
        "--layers",
        "1,2",
        "--train-samples",
        "30",
        "--test-samples",
        "8",
        "--epochs",
        "3",
        "--batch-size",
        "8",
        "--seed",
        "5",
        "--out",
        path(&models),
    ]);
    assert!(models.join("task.json").exists());
    assert!(models.join("lpgm-L2.json").exists());
    assert!(models.join("history.csv").exists());
    let strip = |s: String| -> Vec<String> {
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        v["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| format!("{} {} {}", r["method"], r["layers"], r["mean_rel_err"]))
            .collect()
    };
    let a = strip(ok(&["eval", "--model-dir", path(&models), "--format", "json"]));
    let b = strip(ok(&["eval", "--model-dir", path(&models), "--format", "json"]));
    assert_eq!(a.len(), 4);
    assert_eq!(a, b);
}

#[test]
fn phase_reports_one_row_per_ratio() {
    let csv = ok(&[
        "phase", "--n", "40", "--s-r", "10", "--blocks", "1", "--ratios", "0.2,0.9", "--trials", "3",
    ]);
    let lines = body(&csv);
    assert!(lines[0].starts_with("ratio,m,trials,successes,"));
    assert_eq!(lines.len(), 3);
}
