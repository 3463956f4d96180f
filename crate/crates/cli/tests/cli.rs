use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use structured_persistence::complex::export_text;
use structured_persistence::samples;

fn spers(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spers")).args(args).output().expect("spawn spers")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn two_point_cloud_barcode() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "two.csv", "0,0\n1,0\n");
    let v = json_of(&spers(&["barcode", s(&csv)]));
    assert_eq!(v["0"], serde_json::json!([[0.0, "inf"], [0.0, 1.0]]));
    let out = dir.path().join("out");
    assert!(spers(&["barcode", s(&csv), "--out", s(&out)]).status.success());
    assert!(fs::read_to_string(out.join("barcode.svg")).unwrap().starts_with("<svg"));
    let radius = json_of(&spers(&["barcode", s(&csv), "--convention", "radius"]));
    assert_eq!(radius["0"][1], serde_json::json!([0.0, 0.5]));
}

#[test]
fn empty_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "empty.txt", "");
    let out = spers(&["barcode", s(&p)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
}

#[test]
fn torus_filtration_has_two_long_degree_one_bars() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "torus.txt", &export_text(&samples::torus()));
    let v = json_of(&spers(&["barcode", s(&p)]));
    assert_eq!(v["1"], serde_json::json!([[0.0, "inf"], [0.0, "inf"]]));
    assert_eq!(v["2"], serde_json::json!([[0.0, "inf"]]));
}

fn lower(report: &Value, name: &str, field: u64) -> f64 {
    report
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["distance"] == name && b["field"] == field && b["kind"] == "lower")
        .unwrap_or_else(|| panic!("{name} missing"))["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn distances_torus_vs_wedge() {
    let dir = tempfile::tempdir().unwrap();
    let (w, t) = samples::torus_vs_wedge(0.1);
    let (pw, pt) = (write(dir.path(), "w.txt", &export_text(&w)), write(dir.path(), "t.txt", &export_text(&t)));
    let r = json_of(&spers(&["distances", s(&pw), s(&pt)]));
    assert!(lower(&r, "d_grVect", 2) <= 0.2 + 1e-6);
    assert!(lower(&r, "d_As", 2) >= 0.4 - 1e-6);
    let up = r.as_array().unwrap().iter().find(|b| b["kind"] == "upper").unwrap();
    assert!(up["value"].as_f64().unwrap() <= 0.5 + 1e-6);
    // identical inputs: every lower bound vanishes
    let same = json_of(&spers(&["distances", s(&pt), s(&pt), "--field", "2", "--field", "3"]));
    for b in same.as_array().unwrap().iter().filter(|b| b["kind"] == "lower") {
        assert_eq!(b["value"].as_f64().unwrap(), 0.0, "{b}");
    }
}

#[test]
fn odd_steenrod_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t.txt", &export_text(&samples::torus()));
    let out = spers(&["distances", s(&p), s(&p), "--field", "3", "--structure", "steenrod"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported: odd-p Steenrod action"));
}

#[test]
fn validate_reports_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.txt", "0 ; 0\n1 ; 0\n0 1 ; 1\n");
    let v = json_of(&spers(&["validate", s(&good)]));
    assert_eq!(v["valid"], true);
    let missing = write(dir.path(), "missing.txt", "0 ; 0\n0 1 ; 1\n");
    let out = spers(&["validate", s(&missing)]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"][0]["condition"], 2);
    assert!(v["violations"][0]["at"][0].as_str().unwrap().ends_with("missing.txt:2"));
    let order = write(dir.path(), "order.txt", "0 ; 1\n1 ; 0\n0 1 ; 2\n");
    let v: Value = serde_json::from_slice(&spers(&["validate", s(&order)]).stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert!(v["violations"].as_array().unwrap().iter().any(|x| x["condition"] == 4));
}

#[test]
fn ledger_lists_torus_products() {
    let dir = tempfile::tempdir().unwrap();
    let (_, t) = samples::torus_vs_wedge(0.1);
    let p = write(dir.path(), "t.txt", &export_text(&t));
    let v = json_of(&spers(&["ledger", s(&p), "--steenrod"]));
    let cups = v["snapshots"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|s| s["entries"].as_array().unwrap().iter())
        .filter(|e| e["op"] == "Cup")
        .count();
    assert!(cups > 0);
    assert!(!spers(&["ledger", s(&p), "--steenrod", "--field", "3"]).status.success());
}

#[test]
fn stability_and_determinism() {
    let args = ["stability", "--trials", "5", "--max-points", "12", "--seed", "11"];
    let a = spers(&args);
    let v = json_of(&a);
    assert_eq!(v["ok"], true);
    assert_eq!(a.stdout, spers(&args).stdout);
}
