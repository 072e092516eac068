use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_str().unwrap().to_string()
}

fn rhmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rhmap")).args(args).output().expect("rhmap runs")
}

fn error_of(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str::<Value>(text.trim()).expect("stderr is a JSON error object")["error"].clone()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn wedge_report(dir: &Path) -> String {
    let out = dir.join("wedge.json").to_str().unwrap().to_string();
    let r = rhmap(&["model", "--source", &fixture("wedge.alg"), "--target", &fixture("y.sul"), "--out", &out]);
    assert!(r.status.success());
    out
}

#[test]
fn reports_are_byte_stable() {
    let args = ["model", "--source", &fixture("target_cohomology.alg"), "--target", &fixture("y.sul")];
    let (a, b) = (rhmap(&args), rhmap(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", out.to_str().unwrap()]);
    assert!(rhmap(&with_out).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn rationals_are_strings_and_keys_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let report = wedge_report(dir.path());
    let out = rhmap(&["component", "--model", &report, "--mc=-1/2*e5@y"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["components"][0]["mc"]["e5@y"], "-1/2");
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["checks", "components", "mc", "model"]);
}

#[test]
fn syntax_error_exits_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.alg", "algebra a {\n  basis x:2\n  product x*x = ;\n}\n");
    let out = rhmap(&["check", "--file", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let e = error_of(&out);
    assert_eq!(e["kind"], "parse");
    assert!(e["line"].as_u64().is_some() && e["column"].as_u64().is_some());
    assert_eq!(e["file"], bad.as_str());
}

#[test]
fn odd_square_exits_two_naming_the_pair() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "odd.alg", "algebra a {\n  basis a:3, b:6;\n  product a*a = b;\n}\n");
    let out = rhmap(&["check", "--file", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_of(&out)["message"].as_str().unwrap().contains("a*a"));
}

#[test]
fn failing_d_squared_names_the_generator() {
    let out = rhmap(&["check", "--file", &fixture("bad_d2.sul")]);
    assert_eq!(out.status.code(), Some(2));
    let e = error_of(&out);
    assert_eq!(e["kind"], "invariant");
    assert!(e["message"].as_str().unwrap().contains("generator c"));
}

#[test]
fn three_stage_target_is_rejected_by_model() {
    let out = rhmap(&["model", "--source", &fixture("wedge.alg"), "--target", &fixture("three_stage.sul")]);
    assert_eq!(out.status.code(), Some(1));
    let e = error_of(&out);
    assert_eq!(e["kind"], "not_two_stage");
    assert!(e["message"].as_str().unwrap().contains("d(t)"));
}

#[test]
fn source_with_differential_is_replaced_by_its_cohomology() {
    let dir = tempfile::tempdir().unwrap();
    let src = write(
        dir.path(),
        "cone.alg",
        "algebra sphere_and_cone {\n  basis e2:2, b:3, db:4;\n  d b = db;\n}\n",
    );
    let out = rhmap(&["model", "--source", &src, "--target", &fixture("y.sul"), "--check-transfer", "--max-arity", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let labels: Vec<&str> = v["model"]["source"]["basis"].as_array().unwrap().iter().map(|b| b["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["1", "e2"]);
    assert!(v["model"]["transfer"].as_array().unwrap().iter().all(|t| t["agrees"] == true));
}

#[test]
fn wrong_degree_mc_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let report = wedge_report(dir.path());
    let out = rhmap(&["component", "--model", &report, "--mc", "1@x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(error_of(&out)["message"].as_str().unwrap().contains("1@x"));
}

#[test]
fn unknown_label_in_mc_is_located() {
    let dir = tempfile::tempdir().unwrap();
    let report = wedge_report(dir.path());
    let out = rhmap(&["hspace", "--model", &report, "--mc", "2*e7@y"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(error_of(&out)["message"].as_str().unwrap().contains("e7@y"));
}

#[test]
fn non_automorphism_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let report = wedge_report(dir.path());
    let out = rhmap(&["component", "--model", &report, "--mc", "e5@y", "--automorphism", "e5 = 0"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(error_of(&out)["message"].is_string());
}

#[test]
fn report_without_model_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.json", "{\"checks\": []}");
    let out = rhmap(&["mc", "--model", &empty]);
    assert_eq!(out.status.code(), Some(1));
    assert!(error_of(&out)["message"].as_str().unwrap().contains("model.source.text"));
    let garbage = write(dir.path(), "garbage.json", "not json");
    assert_eq!(rhmap(&["mc", "--model", &garbage]).status.code(), Some(1));
}

#[test]
fn mc_keeps_the_model_section() {
    let dir = tempfile::tempdir().unwrap();
    let report = wedge_report(dir.path());
    let out = rhmap(&["mc", "--model", &report]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let before: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["model"], before["model"]);
    assert_eq!(v["mc"]["variables"], serde_json::json!(["e5@y"]));
}

#[test]
fn parse_warnings_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "w.sul", "sullivan w {\n  generator x:3, z:5;\n  d z = x*x;\n}\n");
    let out = rhmap(&["check", "--file", &s]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["status"] == "warning"));
}
