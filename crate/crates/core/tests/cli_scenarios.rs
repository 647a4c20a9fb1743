use std::path::PathBuf;
use std::process::Command;

use dirac_quant::cli::{run_scenario, Overrides, RunOptions, Status};
use dirac_quant::Error;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dirac-quant")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn load(name: &str) -> String {
    std::fs::read_to_string(scenario(name)).unwrap()
}

#[test]
fn passing_scenarios_exit_zero() {
    for name in ["moyal_minimal.json", "shift_transport.json", "scalar_curvature.json", "dirac_frames.json"] {
        let path = scenario(name);
        let (code, out, err) = run(&["run", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {out}{err}");
    }
}

#[test]
fn corrupted_connection_fails_with_residual() {
    let report = run_scenario(&load("corrupted_connection.json"), &RunOptions::default()).unwrap();
    assert!(!report.passed);
    let mc4 = report.checks.iter().find(|c| c.name == "mc4:bad").unwrap();
    assert_eq!(mc4.status, Status::Fail);
    // hx1∂1 rescales the bivector, so the defect first shows at h^2
    assert!(mc4.residual.as_ref().unwrap().contains("h^2"));
    let path = scenario("corrupted_connection.json");
    assert_eq!(run(&["run", path.to_str().unwrap()]).0, 1);
}

#[test]
fn malformed_literal_is_a_usage_error() {
    let path = scenario("invalid/bad_literal.json");
    let (code, _, err) = run(&["run", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    // the literal starts at column 23 of line 5; "*" is its 5th character
    assert!(err.contains("parse error at 5:27"), "{err}");
    match run_scenario(&load("invalid/bad_literal.json"), &RunOptions::default()) {
        Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (5, 27)),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn json_syntax_errors_carry_position() {
    let src = "{\n  \"name\": \"x\",\n  \"dims\": {\"m\": 2,}\n}";
    match run_scenario(src, &RunOptions::default()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn unresolved_references_and_unknown_fields_are_rejected() {
    let src = r#"{"name": "x", "dims": {"m": 2}, "checks": [{"check": "mc", "sigma": "nope"}]}"#;
    assert!(matches!(run_scenario(src, &RunOptions::default()), Err(Error::Unresolved(_))));
    let src = r#"{"name": "x", "dims": {"m": 2}, "colour": 1, "checks": []}"#;
    assert!(matches!(run_scenario(src, &RunOptions::default()), Err(Error::Parse { .. })));
}

#[test]
fn reports_are_sorted_and_reproducible() {
    let path = scenario("inner_gauge.json");
    let p = path.to_str().unwrap();
    let (c1, a, _) = run(&["run", p, "--format", "json", "--jobs", "1"]);
    let (c2, b, _) = run(&["run", p, "--format", "json", "--jobs", "4"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(v["checks"][0]["timing_ms"].is_null());
}

#[test]
fn check_filter_and_overrides() {
    let opts = RunOptions { kinds: vec!["holonomy".into()], ..RunOptions::default() };
    let report = run_scenario(&load("scalar_curvature.json"), &opts).unwrap();
    assert_eq!(report.checks.len(), 3);
    assert!(report.passed);
    let opts = RunOptions { overrides: Overrides { hbar_order: Some(4), ..Overrides::default() }, ..RunOptions::default() };
    let report = run_scenario(&load("moyal_minimal.json"), &opts).unwrap();
    assert_eq!(report.hbar_order, 4);
    assert!(report.passed);
}

#[test]
fn text_and_json_agree() {
    let report = run_scenario(&load("shift_transport.json"), &RunOptions::default()).unwrap();
    let text = report.to_text();
    for c in &report.checks {
        assert!(text.contains(&format!("PASS  {}", c.name)));
    }
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), report.checks.len());
}
