use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name)
}

fn capgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capgame")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(name: &str) -> String {
    data(name).display().to_string()
}

#[test]
fn check_borel_dwork_confirmed() {
    let out = capgame(&["check", &path("borel_dwork.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["agreement"], "confirmed");
    assert_eq!(v["criterion_holds"], true);
    assert!((v["V_G"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(v["oracle_result"]["numerator"], serde_json::json!(["-1/2"]));
    assert_eq!(v["oracle_result"]["denominator"], serde_json::json!(["-1/2", "1/1"]));
    assert!(!out.stderr.is_empty());
}

#[test]
fn check_agreement_labels() {
    let v = json(&capgame(&["check", &path("borel_dwork_unit_disk.json")]));
    assert_eq!(v["agreement"], "oracle_only");
    assert_eq!(v["V_G"], 0.0);
    assert_eq!(v["margin_flag"], "marginal");
    let v = json(&capgame(&["check", &path("exp_small_disk.json")]));
    assert_eq!(v["agreement"], "both_negative");
    assert!((v["V_G"].as_f64().unwrap() + std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(v["oracle_result"]["status"], "not_found");
}

#[test]
fn value_with_infinite_off_diagonal() {
    let out = capgame(&["value", &path("infinite_off_diagonal.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], "inf");
}

#[test]
fn missing_file_is_a_parse_error() {
    let out = capgame(&["check", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "parse");
}

#[test]
fn malformed_document_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(&file, "{\"points\": [}").unwrap();
    let out = capgame(&["check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pole_outside_domain_is_a_computation_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("outside.json");
    std::fs::write(
        &file,
        r#"{"points": [{"id": 0, "coordinate": "3"}],
            "series": [{"point": 0, "coefficients": ["1"]}],
            "arch_places": [{"domain": {"kind": "disk", "center": "0", "radius": "1"}}],
            "degree_bound": 1}"#,
    )
    .unwrap();
    let out = capgame(&["value", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn default_schedule_needs_positive_value() {
    let out = capgame(&["schedule", &path("exp_small_disk.json"), "--K", "10"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["error"]["kind"], "precondition");
}

#[test]
fn schedule_with_explicit_weights() {
    let out = capgame(&["schedule", &path("two_points.json"), "--K", "3", "--a", "2/3,1/3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schedule"]["sequence"], serde_json::json!([1, 2, 1]));
    assert_eq!(v["bounds"]["verdict"], true);
}

#[test]
fn greens_and_matrix_and_oracle() {
    let v = json(&capgame(&["greens", &path("borel_dwork.json"), "--pole", "0", "--at", "1,0"]));
    assert!((v["value"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    let v = json(&capgame(&["matrix", &path("two_points.json")]));
    assert_eq!(v["size"], 2);
    assert!(v["places"].as_object().unwrap().contains_key("p=5"));
    let v = json(&capgame(&["oracle", &path("two_points.json")]));
    assert_eq!(v["status"], "rational");
    let v = json(&capgame(&["oracle", &path("exp_small_disk.json"), "--degree", "2"]));
    assert_eq!(v["degrees_tried"], serde_json::json!([0, 1, 2]));
}

#[test]
fn reports_are_byte_identical() {
    let a = capgame(&["check", &path("two_points.json")]);
    let b = capgame(&["check", &path("two_points.json")]);
    assert_eq!(a.stdout, b.stdout);
}
