use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xihom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xihom"))
        .args(args)
        .env_remove("XIHOM_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn pd_of_dual_numbers_simple_exceeds_window() {
    let out = xihom(&["--format", "json", "pd", "--catalog", "dual_numbers", "k"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "pd");
    assert_eq!(v["result"]["pd"], "exceeds_window");
    assert!(out.stderr.is_empty());
}

#[test]
fn ext_routes_agree_over_a2() {
    let out = xihom(&["ext", "--catalog", "a2", "S1", "S2", "--deg", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json(&out)["result"]["rows"][0];
    assert_eq!(row["projective"], 1);
    assert_eq!(row["two_resolutions"], 1);
    assert_eq!(row["injective"], 1);
    assert_eq!(row["agree"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("two resolutions"));
}

#[test]
fn table_format_writes_only_to_stderr() {
    let out = xihom(&["--format", "table", "basis", "--catalog", "a3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension 6"));
}

#[test]
fn complete_ext_over_negative_range() {
    let out = xihom(&["--format", "json", "complete-ext", "--catalog", "truncated_cube", "k", "k", "--range", "-4..4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["regime"], "certified_self_injective");
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    for r in rows {
        assert_eq!(r["dimension"], 1);
        assert_eq!(r["stable_oracle"], 1);
    }
}

#[test]
fn gpd_reports_regime() {
    let out = xihom(&["--format", "json", "gpd", "--catalog", "a2", "S1"]);
    let v = json(&out);
    assert_eq!(v["result"]["gpd"]["value"], serde_json::json!({"finite": 1}));
    assert_eq!(v["result"]["gpd"]["regime"], "certified_finite_pd");
}

#[test]
fn malformed_json_exits_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "broken.json", "{\n  \"p\": 2,\n  \"quiver\": [\n}");
    let out = xihom(&["pd", "-i", &path, "k"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn invalid_instances_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value = serde_json::from_str(xihom::instance::catalog::source("dual_numbers").unwrap()).unwrap();
    doc["modules"]["k"]["action"]["x"] = serde_json::json!([[1]]);
    let path = write(dir.path(), "bad.json", &doc.to_string());
    let out = xihom(&["pd", "-i", &path, "k"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("module `k`"));
    assert_eq!(xihom(&["pd", "-i", &path, "k"]).status.code(), Some(2));
    assert_eq!(xihom(&["pd", "--catalog", "dual_numbers", "nope"]).status.code(), Some(2));
    assert_eq!(xihom(&["pd", "--catalog", "nope", "k"]).status.code(), Some(2));
    assert_eq!(xihom(&["ext", "--catalog", "a2", "S1", "S2", "--range", "3..1"]).status.code(), Some(2));
}

#[test]
fn broken_class_audit_exits_three() {
    let out = xihom(&["--format", "json", "audit", "--catalog", "dual_numbers", "--trials", "20", "--fixture"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out)["result"]["counterexamples"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn reports_are_deterministic() {
    let args = ["--format", "json", "audit", "--catalog", "truncated_cube", "--trials", "40", "--seed", "9"];
    let first = xihom(&args);
    let second = xihom(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_xihom"))
        .args(args)
        .env("XIHOM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(first.stdout, single.stdout);
}

#[test]
fn timing_is_opt_in() {
    let plain = json(&xihom(&["--format", "json", "basis", "--catalog", "a2"]));
    assert!(plain.get("wall_clock_ms").is_none());
    let timed = json(&xihom(&["--format", "json", "--timing", "basis", "--catalog", "a2"]));
    assert!(timed["wall_clock_ms"].is_number());
}

#[test]
fn instance_files_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let inst = xihom::instance::catalog::load("a3").unwrap().unwrap();
    let path = write(dir.path(), "a3.json", &inst.to_json());
    let from_file = xihom(&["--format", "json", "ext", "-i", &path, "S1", "S2", "--range", "0..3"]);
    let from_catalog = xihom(&["--format", "json", "ext", "--catalog", "a3", "S1", "S2", "--range", "0..3"]);
    assert_eq!(json(&from_file)["result"], json(&from_catalog)["result"]);
}

#[test]
fn verify_catalog_passes() {
    let out = xihom(&["--format", "json", "verify", "--catalog"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let criteria = v["result"]["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 8);
    assert!(criteria.iter().all(|c| c["passed"] == true));
}

#[test]
fn verify_single_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "a2.json", xihom::instance::catalog::source("a2").unwrap());
    let out = xihom(&["--format", "json", "verify", &path, "--trials", "20", "--homotopy-trials", "10"]);
    assert_eq!(out.status.code(), Some(0));
}
