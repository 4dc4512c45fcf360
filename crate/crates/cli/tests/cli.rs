use std::process::Command as Proc;

use koopman_cli::{render, run, Backend, Command, Format, RunConfig};
use serde_json::Value;

fn small(command: Command) -> RunConfig {
    RunConfig { command, level_max: 1, degree_max: 3, depth_max: 3, samples: 50_000, seed: 7, ..RunConfig::default() }
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&v).unwrap()
}

fn assert_valid(report: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(report) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "schema violations: {msgs:?}");
}

fn koopman(args: &[&str]) -> std::process::Output {
    Proc::new(env!("CARGO_BIN_EXE_koopman")).args(args).env_remove("KOOPMAN_REPORT_DIR").output().unwrap()
}

#[test]
fn every_suite_passes_and_matches_schema() {
    let report = run(&small(Command::All)).unwrap();
    assert!(report.passed(), "{}", report.to_text());
    assert_eq!(report.suites.len(), 7);
    assert!(report.suites.iter().all(|s| !s.anchor.is_empty() && s.cases > 0));
    let v: Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_valid(&v);
}

#[test]
fn float_backend_passes() {
    let cfg = RunConfig { backend: Backend::Float, phase_order: 7, ..small(Command::All) };
    let report = run(&cfg).unwrap();
    assert!(report.passed(), "{}", report.to_text());
}

#[test]
fn reports_are_deterministic_outside_timings() {
    let cfg = small(Command::All);
    let strip = |s: String| {
        let mut v: Value = serde_json::from_str(&s).unwrap();
        v.as_object_mut().unwrap().remove("timings");
        v.to_string()
    };
    let a = strip(render(&run(&cfg).unwrap(), Format::Json));
    let b = strip(render(&run(&cfg).unwrap(), Format::Json));
    assert_eq!(a, b);
    let csv_a = render(&run(&cfg).unwrap(), Format::Csv);
    let csv_b = render(&run(&cfg).unwrap(), Format::Csv);
    assert_eq!(csv_a, csv_b);
    let text = |s: String| s.split("\ntimings (ms)").next().unwrap().to_string();
    assert_eq!(text(render(&run(&cfg).unwrap(), Format::Text)), text(render(&run(&cfg).unwrap(), Format::Text)));
}

#[test]
fn failures_carry_counterexamples() {
    let mut r = koopman_cli::report::SuiteReport::new("x", "y");
    for i in 0..40 {
        r.check(i % 2 == 0, || format!("case {i}"), || serde_json::json!({ "i": i }));
    }
    assert_eq!(r.cases, 40);
    assert_eq!(r.failure_count, 20);
    assert_eq!(r.failures.len(), 20);
    assert_eq!(r.failures[0].counterexample["i"], 1);
    assert!(!r.passed());
}

#[test]
fn fock_example_run() {
    let out = koopman(&["verify-fock", "--level-max", "2", "--degree-max", "4", "--backend", "exact"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[PASS] verify-fock"));
}

#[test]
fn spectral_json_reproduces_the_scaling_rule() {
    let out = koopman(&["verify-spectral", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid(&v);
    let grid = v["suites"][0]["data"]["constraint_grid"].as_array().unwrap();
    let single: Vec<_> = grid.iter().filter(|r| r["indices"] == serde_json::json!(["x_{1,0}"])).collect();
    assert_eq!(single.len(), 6);
    for row in single {
        let m = row["coefficients"][0].as_i64().unwrap();
        assert_eq!(row["abs_cont"].as_bool().unwrap(), m.abs() == 1, "m = {m}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(koopman(&["simulate", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(koopman(&["verify-fock", "--phase-order", "3"]).status.code(), Some(2));
    assert_eq!(koopman(&["verify-fock", "--level-max", "0"]).status.code(), Some(2));
    assert_eq!(koopman(&["verify-fock", "--backend", "interval"]).status.code(), Some(2));
    assert_eq!(koopman(&["nonsense"]).status.code(), Some(2));
    assert_eq!(koopman(&["--help"]).status.code(), Some(0));
}

#[test]
fn caps_exit_3() {
    assert_eq!(koopman(&["verify-fock", "--level-max", "9"]).status.code(), Some(3));
    assert_eq!(koopman(&["simulate", "--depth-max", "40"]).status.code(), Some(3));
}

#[test]
fn io_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("report.json");
    let out = koopman(&["verify-density", "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn output_file_and_report_dir() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/density.csv");
    let out = koopman(&["verify-density", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.starts_with("suite,anchor,status,cases,failures,notes\nverify-density,"));

    let out = Proc::new(env!("CARGO_BIN_EXE_koopman"))
        .args(["verify-density", "--format", "json"])
        .env("KOOPMAN_REPORT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify-density.json")).unwrap()).unwrap();
    assert_valid(&v);
    assert_eq!(v["config"]["command"], "verify-density");
}

#[test]
fn simulate_echoes_seed_and_samples() {
    let cfg = RunConfig { samples: 3000, seed: 42, depth_max: 2, ..small(Command::Simulate) };
    let report = run(&cfg).unwrap();
    let data = &report.suites[0].data;
    assert_eq!(data["seed"], 42);
    assert_eq!(data["samples"], 3000);
    let rows = data["estimates"].as_array().unwrap();
    assert_eq!(rows.len(), 40);
    for row in rows {
        assert!(row["exact"].is_array() && row["estimate"].is_array() && row["std_error"].is_number());
    }
}
