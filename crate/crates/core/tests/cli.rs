mod common;

use common::{data, pcsp};
use serde_json::Value;
use std::path::Path;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = pcsp().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn d(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_exit_codes() {
    let (code, out, _) = run(&["solve", "--instance", &d("edge.json"), "--template", &d("k2.json")]);
    assert_eq!((code, out.trim()), (0, "satisfiable"));
    let (code, out, _) = run(&["solve", "--instance", &d("c5.json"), "--template", &d("k2.json")]);
    assert_eq!((code, out.trim()), (1, "unsatisfiable"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["solve"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(
        run(&["gap", "params", "--domain-size", "x", "--m", "1", "--values", "1,1"]).0,
        2
    );
}

#[test]
fn missing_files_exit_one() {
    let (code, out, err) = run(&["solve", "--instance", "/nonexistent.json", "--template", &d("k2.json")]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.starts_with("error:"));
}

#[test]
fn llc_reduction_defaults_to_the_mcsp_structure() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("unary.json");
    std::fs::write(
        &inst,
        r#"{"variables": ["a", "b", "c"], "constraints": [{"scope": ["a"], "relation": "{0}"}]}"#,
    )
    .unwrap();
    let params = dir.path().join("params.json");
    let (code, _, _) = run(&[
        "gap",
        "params",
        "--domain-size",
        "2",
        "--m",
        "1",
        "--values",
        "1,1",
        "--out",
        params.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let out = dir.path().join("llc.json");
    let (code, text, _) = run(&[
        "reduce",
        "llc",
        "--instance",
        inst.to_str().unwrap(),
        "--params",
        params.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!((code, text.trim()), (0, "4 variables on 2 layers"));
    assert_eq!(json(&out)["layers"].as_array().unwrap().len(), 2);
}

#[test]
fn gap_params_prints_json() {
    let (code, out, err) = run(&["gap", "params", "--domain-size", "2", "--m", "1", "--values", "1,1"]);
    assert_eq!(code, 0);
    assert_eq!(err.trim(), "k = [3,2]");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["k"], serde_json::json!([3, 2]));
}

#[test]
fn poly_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pol.json");
    let (code, text, _) = run(&[
        "poly",
        "enum",
        "--template",
        &d("k2k3.json"),
        "--arity",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(text.starts_with("6 polymorphisms"));
    assert!(out.exists());
    let (code, text, _) = run(&["poly", "enum", "--template", &d("k2k2.json"), "--arity", "2"]);
    assert_eq!((code, text.trim()), (0, "4 polymorphisms of arity 2"));
    assert_eq!(
        run(&[
            "poly",
            "check",
            "--template",
            &d("k2k2.json"),
            "--function",
            &d("xor.json")
        ])
        .0,
        1
    );
}

#[test]
fn reports_record_inputs_and_checks() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let sol = dir.path().join("sol.json");
    let (code, _, _) = run(&[
        "solve",
        "--instance",
        &d("edge.json"),
        "--template",
        &d("k2.json"),
        "--out",
        sol.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--seed",
        "17",
    ]);
    assert_eq!(code, 0);
    let r = json(&report);
    assert_eq!(r["command"], "solve");
    assert_eq!(r["exit_code"], 0);
    assert_eq!(r["seed"], 17);
    assert_eq!(r["inputs"].as_object().unwrap().len(), 2);
    assert!(r.get("timings_ms").is_none_or(Value::is_null));

    let verify = dir.path().join("verify.json");
    let (code, _, _) = run(&[
        "verify",
        "--instance",
        &d("edge.json"),
        "--template",
        &d("k2.json"),
        "--assignment",
        sol.to_str().unwrap(),
        "--report",
        verify.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(json(&verify)["verification"]
        .as_object()
        .unwrap()
        .values()
        .all(|v| v == "pass"));
}

#[test]
fn bad_assignment_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"values": {"x": "0", "y": "0", "z": "1"}}"#).unwrap();
    let (code, _, _) = run(&[
        "verify",
        "--instance",
        &d("edge.json"),
        "--template",
        &d("k2.json"),
        "--assignment",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn end_to_end_pipeline_and_determinism() {
    let a = tempfile::tempdir().unwrap();
    let runs = common::cli_suite(a.path());
    let codes: Vec<i32> = runs.iter().map(|r| r.0).collect();
    assert_eq!(codes, vec![0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
    let ext = json(&a.path().join("ext.json"));
    // x != y in the source
    assert_ne!(ext["values"]["x"], ext["values"]["y"]);
    assert_eq!(ext["side"], "relaxed");
    // a second pass in the same place rewrites identical bytes
    let before: Vec<(String, Vec<u8>)> = list(a.path());
    let again = common::cli_suite(a.path());
    assert_eq!(runs, again);
    assert_eq!(before, list(a.path()));
}

fn list(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}
