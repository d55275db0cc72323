use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fedosov"))
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
    out: PathBuf,
}

impl Run {
    fn report(&self) -> Value {
        serde_json::from_str(&fs::read_to_string(self.out.join("report.json")).unwrap()).unwrap()
    }
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(dir: &Path, cmd: &str, config: &Path, extra: &[&str], out: &str) -> Run {
    let out = dir.join(out);
    let o: Output = bin()
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    Run {
        code: o.status.code().unwrap(),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
        out,
    }
}

const STANDARD: &str = r#"{"chart": {"catalogue": "standard", "params": [1]}}"#;

/// The four-dimensional zero-anchor chart with `c¹₁₂` switched on, which
/// breaks the Jacobi identity against `[e₁, e₃] = e₃`.
const CORRUPTED: &str = r#"{"chart": {"inline": {
  "base_vars": ["t"], "rank": 4,
  "anchor": [["0", "0", "0", "0"]],
  "structure": [
    [["0","0","0","0"], ["1","0","0","0"], ["0","0","1","0"], ["0","0","0","0"]],
    [["-1","0","0","0"], ["0","0","0","0"], ["0","0","0","0"], ["0","0","0","1"]],
    [["0","0","-1","0"], ["0","0","0","0"], ["0","0","0","0"], ["0","0","0","0"]],
    [["0","0","0","0"], ["0","0","0","-1"], ["0","0","0","0"], ["0","0","0","0"]]],
  "omega": [["0","0","1","0"], ["0","0","0","1"], ["-1","0","0","0"], ["0","-1","0","0"]]}}}"#;

#[test]
fn check_accepts_the_standard_chart() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "std.json", STANDARD);
    let r = run(d.path(), "check", &cfg, &[], "out");
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = r.report();
    assert_eq!(rep["pass"], true);
    assert!(rep["axioms"].as_array().unwrap().iter().all(|a| a["pass"] == true));
    assert!(fs::read_to_string(r.out.join("report.txt")).unwrap().ends_with("result: PASS\n"));
}

#[test]
fn check_reports_the_jacobi_witness() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "bad.json", CORRUPTED);
    let r = run(d.path(), "check", &cfg, &[], "out");
    assert_eq!(r.code, 1);
    let rep = r.report();
    let jacobi = rep["axioms"].as_array().unwrap().iter().find(|a| a["axiom"] == "jacobi").unwrap().clone();
    assert_eq!(jacobi["pass"], false);
    assert_eq!(jacobi["witness"], serde_json::json!([1, 2, 3]));
    assert_eq!(jacobi["residual"], "1");
    assert!(r.stdout.contains("jacobi: FAIL witness (1,2,3)"));
}

#[test]
fn malformed_polynomial_is_a_usage_error_with_location() {
    let d = TempDir::new().unwrap();
    let body = CORRUPTED.replace(r#"["-1","0","0","0"], ["0","-1""#, r#"["-1 +* t","0","0","0"], ["0","-1""#);
    let cfg = write_config(d.path(), "malformed.json", &body);
    let r = run(d.path(), "check", &cfg, &[], "out");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("chart.inline.omega[2][0]: parse error at offset 4"), "{}", r.stderr);
    assert!(!r.out.join("report.json").exists());
}

#[test]
fn broken_json_and_flags_are_usage_errors() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "broken.json", "{\"chart\": {\"catalogue\": \"standard\"},\n \"order\": }");
    let r = run(d.path(), "check", &cfg, &[], "out");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("broken.json:2:"), "{}", r.stderr);
    let cfg = write_config(d.path(), "unknown.json", r#"{"chart": {"catalogue": "torus"}}"#);
    assert_eq!(run(d.path(), "check", &cfg, &[], "out").code, 2);
    let cfg = write_config(d.path(), "std.json", STANDARD);
    assert_eq!(run(d.path(), "build", &cfg, &["--order", "1"], "out").code, 2);
    assert_eq!(bin().arg("star").output().unwrap().status.code(), Some(2));
}

#[test]
fn build_rejects_a_theta_that_is_not_closed() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "open.json",
        r#"{"chart": {"catalogue": "standard", "params": [2]}, "order": 4, "theta": {"1,2": "hbar*x2"}}"#,
    );
    let r = run(d.path(), "build", &cfg, &[], "out");
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("d(theta)[1,2,3]"), "{}", r.stderr);
    assert_eq!(r.report()["pass"], false);
    assert!(!r.out.join("connection.json").exists());
}

#[test]
fn build_writes_a_flat_connection_that_star_can_reuse() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "std.json", STANDARD);
    let r = run(d.path(), "build", &cfg, &["--order", "4"], "built");
    assert_eq!(r.code, 0, "{}", r.stderr);
    let art: Value = serde_json::from_str(&fs::read_to_string(r.out.join("connection.json")).unwrap()).unwrap();
    assert_eq!(art["certificate"]["flat"], true);
    let reuse = write_config(
        d.path(),
        "reuse.json",
        r#"{"chart": {"catalogue": "standard"}, "order": 4, "connection": "built/connection.json"}"#,
    );
    let s = run(d.path(), "star", &reuse, &["x1", "xi1"], "star");
    assert_eq!(s.code, 0, "{}", s.stderr);
    assert_eq!(s.report()["product"], "x1*xi1 + hbar^1*(1/2 i)");
    // an artifact of another order does not match the job
    let s = run(d.path(), "star", &reuse, &["--order", "6", "x1", "xi1"], "star6");
    assert_eq!(s.code, 2);
}

#[test]
fn star_on_the_flat_chart() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "std.json", STANDARD);
    let r = run(d.path(), "star", &cfg, &["x1", "xi1"], "out");
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("(x1) * (xi1) = x1*xi1 + hbar^1*(1/2 i)"), "{}", r.stdout);
    let r = run(d.path(), "star", &cfg, &["xi1", "x1"], "rev");
    assert_eq!(r.report()["product"], "x1*xi1 + hbar^1*(-1/2 i)");
    let r = run(d.path(), "star", &cfg, &["x1", "xi1 +"], "bad");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("G: parse error"), "{}", r.stderr);
}

#[test]
fn gauge_on_equal_classes_writes_the_gauge_element() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "eq.json",
        r#"{"chart": {"catalogue": "standard"}, "order": 4,
            "gauge": {"gamma": [[["1", "0"], ["0", "-1"]], [["0", "0"], ["0", "0"]]]}}"#,
    );
    let r = run(d.path(), "gauge", &cfg, &[], "out");
    assert_eq!(r.code, 0, "{}", r.stderr);
    let g: Value = serde_json::from_str(&fs::read_to_string(r.out.join("gauge.json")).unwrap()).unwrap();
    assert!(!g["deltas"].as_array().unwrap().is_empty());
    assert_eq!(r.report()["pass"], true);
}

#[test]
fn gauge_on_unequal_classes_reports_the_obstruction() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "neq.json",
        r#"{"chart": {"catalogue": "zero_anchor"}, "order": 4, "gauge": {"theta": {"1,2": "hbar"}}}"#,
    );
    let r = run(d.path(), "gauge", &cfg, &[], "out");
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("obstruction in Fedosov degree 2"), "{}", r.stdout);
    assert!(!r.out.join("gauge.json").exists());
    assert_eq!(r.report()["pass"], false);
}

#[test]
fn remaining_commands_pass_on_a_catalogue_chart() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "mixed.json",
        r#"{"chart": {"catalogue": "mixed", "params": [1, 0, 0]}, "order": 4,
            "theta": {"1,2": "hbar*z1"}, "samples": {"count": 4, "degree": 2},
            "tensor": {"degree_bound": 2}, "torus": {"samples": 5}}"#,
    );
    for cmd in ["verify", "class", "tensor", "trace"] {
        let r = run(d.path(), cmd, &cfg, &[], cmd);
        assert_eq!(r.code, 0, "{cmd}: {}{}", r.stdout, r.stderr);
        assert_eq!(r.report()["pass"], true, "{cmd}");
    }
    assert!(d.path().join("tensor/tensor.json").exists());
}

#[test]
fn reports_are_deterministic() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "std.json", STANDARD);
    for cmd in ["verify", "build", "trace"] {
        let a = run(d.path(), cmd, &cfg, &["--order", "4", "--seed", "11"], &format!("{cmd}-a"));
        let b = run(d.path(), cmd, &cfg, &["--order", "4", "--seed", "11"], &format!("{cmd}-b"));
        assert_eq!(a.code, 0, "{cmd}: {}", a.stderr);
        for f in ["report.json", "report.txt"] {
            assert_eq!(fs::read(a.out.join(f)).unwrap(), fs::read(b.out.join(f)).unwrap(), "{cmd} {f}");
        }
    }
}
