//! Exit codes and output of the `quadlab` binary.

use std::process::{Command, Output};

use serde_json::Value;

const CARDIOID_H: &str = r#"{"num":[[0.5,0],[1.5,0]],"den":[[0,0],[0,0],[1,0]]}"#;

fn quadlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadlab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn cardioid_map(gamma: f64) -> String {
    format!(
        r#"{{"kind":"rational","orientation":"interior","zFactor":false,"blaschke":[],"prefactor":[1,0],
            "r":{{"num":[[0,0],[1,0],[{gamma},0]],"den":[[1,0]]}}}}"#
    )
}

fn cardioid_spec() -> String {
    format!(r#"{{"a":1,"h":{CARDIOID_H},"bounded":true}}"#)
}

#[test]
fn classify_reports_the_positive_regime() {
    let out = quadlab(&["classify", "--alpha", "1", "--w0", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["exists"], true);
    assert_eq!(v["regime"], "positiveAlpha");
    assert_eq!(v["tStar"].as_f64(), Some(8.0));
    assert_eq!(v["cStar"].as_f64(), Some(3.0));
}

#[test]
fn verify_accepts_the_cardioid() {
    let out = quadlab(&["verify", "--spec", &cardioid_spec(), "--map", &cardioid_map(0.5)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["maxRel"].as_f64().unwrap() < 1e-10);
}

#[test]
fn verify_rejects_a_perturbed_cardioid() {
    let out = quadlab(&["verify", "--spec", &cardioid_spec(), "--map", &cardioid_map(0.501)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out)["maxRel"].as_f64().unwrap() > 1e-5);
}

#[test]
fn inverse_solve_recovers_the_cardioid() {
    let out = quadlab(&["solve-inverse", "--h", CARDIOID_H, "--w0", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let num = &v["solution"]["map"]["r"]["num"];
    assert!((num[1][0].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((num[2][0].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not univalent"));
}

#[test]
fn malformed_input_exits_with_the_input_code() {
    assert_eq!(quadlab(&["classify", "--alpha", "zz", "--w0", "2"]).status.code(), Some(4));
    assert_eq!(quadlab(&["verify", "--spec", "{", "--map", &cardioid_map(0.5)]).status.code(), Some(4));
}

#[test]
fn csv_output_has_a_header_row() {
    let dir = std::env::temp_dir().join(format!("quadlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cardioid.csv");
    let out = quadlab(&["render", "--map", &cardioid_map(0.5), "--out", path.to_str().unwrap(), "--nodes", "64"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,re,im"));
    assert!(lines.count() >= 64);
    std::fs::remove_dir_all(&dir).ok();
}
