use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssvrptw"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = run(dir, args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "generate",
            "--customers",
            "8",
            "--waiting",
            "4",
            "--fleet",
            "2",
            "--capacity",
            "5",
            "--seed",
            "2",
            "-o",
            "inst.json",
        ],
    );
    dir
}

#[test]
fn solve_then_evaluate() {
    let dir = setup();
    let d = dir.path();
    ok(
        d,
        &[
            "solve",
            "inst.json",
            "--method",
            "a1-bstar",
            "--iterations",
            "300",
            "-o",
            "sol.json",
            "--report",
            "r.json",
        ],
    );
    let report: Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    let eval: Value = serde_json::from_str(&ok(d, &["evaluate", "inst.json", "sol.json"])).unwrap();
    assert_eq!(eval["feasible"], Value::Bool(true));
    let (rq, rqplus) = (eval["e_rq"].as_f64().unwrap(), eval["e_rqplus"].as_f64().unwrap());
    assert!(rqplus <= rq + 1e-12);
    assert!(report.get("wall_time").is_some());
}

#[test]
fn simulate_and_oracle_print_json() {
    let dir = setup();
    let d = dir.path();
    ok(
        d,
        &[
            "solve",
            "inst.json",
            "--method",
            "single:1:10",
            "--iterations",
            "200",
            "-o",
            "sol.json",
        ],
    );
    let ws: Value = serde_json::from_str(&ok(d, &["simulate", "inst.json", "--samples", "500"])).unwrap();
    assert_eq!(ws["n_samples"], 500);
    let rq: Value = serde_json::from_str(&ok(d, &["simulate", "inst.json", "sol.json", "--samples", "500"])).unwrap();
    assert!(rq["mean"].as_f64().unwrap() >= 0.0);
    // too many uncertain requests to enumerate
    let o = run(d, &["oracle", "inst.json", "sol.json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn experiment_and_report() {
    let dir = setup();
    let d = dir.path();
    fs::write(
        d.join("spec.json"),
        r#"{"instances": ["inst.json"], "methods": ["a-star-b10"], "seeds": [1], "budget": {"iterations": 100}, "mc_samples": 500}"#,
    )
    .unwrap();
    ok(d, &["experiment", "spec.json", "-o", "rows.jsonl"]);
    assert_eq!(fs::read_to_string(d.join("rows.jsonl")).unwrap().lines().count(), 1);
    let summary = ok(d, &["report", "rows.jsonl", "--profiles", "p.csv"]);
    assert!(summary.starts_with("instance,ws_mean,a-star-b10_cost"));
    assert!(fs::read_to_string(d.join("p.csv")).unwrap().starts_with("method,x,y"));
}

#[test]
fn usage_and_input_errors_exit_with_2() {
    let dir = setup();
    let d = dir.path();
    assert_eq!(run(d, &["solve", "missing.json"]).status.code(), Some(2));
    assert_eq!(
        run(d, &["solve", "inst.json", "--method", "bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(run(d, &["no-such-command"]).status.code(), Some(2));
    fs::write(d.join("bad.json"), "{").unwrap();
    assert_eq!(run(d, &["evaluate", "inst.json", "bad.json"]).status.code(), Some(2));
}

#[test]
fn zero_time_limit_is_a_budget_refusal() {
    let dir = setup();
    let o = run(dir.path(), &["solve", "inst.json", "--time-limit", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn files_survive_a_read_write_cycle() {
    let dir = setup();
    let d = dir.path();
    ok(
        d,
        &[
            "solve",
            "inst.json",
            "--method",
            "a1-bstar",
            "--iterations",
            "100",
            "-o",
            "sol.json",
        ],
    );
    let inst = ssvrptw::model::io::read_instance(d.join("inst.json")).unwrap();
    ssvrptw::model::io::write_instance(d.join("inst2.json"), &inst).unwrap();
    assert_eq!(
        fs::read(d.join("inst.json")).unwrap(),
        fs::read(d.join("inst2.json")).unwrap()
    );
    let sol = ssvrptw::model::io::read_solution(d.join("sol.json")).unwrap();
    ssvrptw::model::io::write_solution(d.join("sol2.json"), &sol).unwrap();
    assert_eq!(
        fs::read(d.join("sol.json")).unwrap(),
        fs::read(d.join("sol2.json")).unwrap()
    );
}
