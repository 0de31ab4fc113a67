//! End-to-end runs of the `wmono` binary: report contents and exit codes.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn wmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmono"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = wmono(args);
    let code = out.status.code().expect("exit code");
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (code, v)
}

fn all_pass(v: &Value) -> bool {
    v["summary"]["failed"] == 0
        && v["instances"]
            .as_array()
            .unwrap()
            .iter()
            .all(|i| i["pass"] == true)
}

#[test]
fn rewrite_lists_pair_difference() {
    let (code, v) = report(&["rewrite", "--case", "z", "--expr", "c(1)a(1)"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["normalForm"], "-a(0)c(0) + a(1)c(1)");
    assert_eq!(
        v["data"]["pairs"],
        json!([{"pair": 0, "coeff": -1}, {"pair": 1, "coeff": 1}])
    );
    assert!(all_pass(&v));
}

#[test]
fn rewrite_steps_and_n_case() {
    let (code, v) = report(&[
        "rewrite",
        "--case",
        "n",
        "--expr",
        "a(1)c(1)",
        "--show-steps",
    ]);
    assert_eq!(code, 0);
    assert!(v["data"]["steps"].as_array().is_some_and(|s| !s.is_empty()));
    assert!(v["data"]["paths"].is_array());
}

#[test]
fn moments_are_catalan() {
    let (code, v) = report(&["moments", "--expr", "x(1)", "--max-order", "10"]);
    assert_eq!(code, 0);
    assert_eq!(
        v["data"]["moments"],
        json!([1, 0, 1, 0, 2, 0, 5, 0, 14, 0, 42])
    );
    let out = wmono(&["moments", "--expr", "x(1)", "--max-order", "4", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6, "{text}");
}

#[test]
fn verify_suites_pass() {
    for args in [
        vec![
            "verify",
            "--suite",
            "exel-laca",
            "--window",
            "-6..6",
            "--particles",
            "4",
        ],
        vec![
            "verify",
            "--suite",
            "relations-z",
            "--window",
            "-2..2",
            "--particles",
            "3",
        ],
        vec![
            "verify",
            "--suite",
            "anti",
            "--window",
            "1..4",
            "--particles",
            "4",
        ],
        vec![
            "verify",
            "--suite",
            "rep-n",
            "--window",
            "1..4",
            "--particles",
            "3",
            "--level",
            "0,1,2",
        ],
    ] {
        let (code, v) = report(&args);
        assert_eq!(code, 0, "{args:?}");
        assert!(all_pass(&v), "{args:?}");
    }
}

#[test]
fn verify_with_family_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(
        f,
        r#"{{"explicit": [{{"x": [3], "y": [0]}}, {{"x": [0], "y": [3]}}]}}"#
    )
    .unwrap();
    let path = f.path().to_str().unwrap();
    let (code, v) = report(&[
        "verify",
        "--suite",
        "exel-laca",
        "--window",
        "-1..5",
        "--particles",
        "3",
        "--family",
        path,
    ]);
    assert_eq!(code, 0);
    let ids: Vec<&str> = v["instances"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["id"].as_str().unwrap())
        .collect();
    assert!(
        ids.iter().any(|id| id.starts_with("relation(X={3}")),
        "{ids:?}"
    );
}

#[test]
fn decompose_spec_file() {
    let spec = json!({
        "generators": 3,
        "particles": 3,
        "blocks": [
            {"level": 0, "phase": {"re": 0.0, "im": 1.0}},
            {"level": 1, "phase": -1.0, "multiplicity": 2}
        ],
        "zero_block": 2
    });
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{spec}").unwrap();
    let (code, v) = report(&["reps", "decompose", "--spec", f.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    assert!(all_pass(&v));
}

#[test]
fn cesaro_limit_states_certificate_commutant() {
    let (code, _) = report(&["cesaro", "--word", "c(0)c(-1)", "--n", "4,16"]);
    assert_eq!(code, 0);
    let (code, v) = report(&["limit", "--N", "10,20,40", "--vector", "2,1"]);
    assert_eq!(code, 0);
    assert!(all_pass(&v));
    let (code, _) = report(&["states", "--expr", "3*I + 2*a(5)c(5)", "--t", "0,1/3,1"]);
    assert_eq!(code, 0);
    let (code, v) = report(&["certificate", "--expr", "a(0)c(0)"]);
    assert_eq!(code, 0);
    assert_eq!(v["instances"][0]["details"]["value_sq"], 1);
    let (code, v) = report(&["commutant", "--gens", "n:2:2:c(1);c(2)", "--expect", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["dimension"], 1);
}

#[test]
fn exit_codes() {
    // failed check
    let (code, v) = report(&["commutant", "--gens", "n:1:1:c(1)", "--expect", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["summary"]["failed"], 1);
    // usage errors
    assert_eq!(
        wmono(&[
            "verify",
            "--suite",
            "nope",
            "--window",
            "1..2",
            "--particles",
            "2"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        wmono(&["rewrite", "--case", "z", "--expr", "c(1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        wmono(&["limit", "--N", "10", "--vector", "1,2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        wmono(&["certificate", "--expr", "I + c(0)"]).status.code(),
        Some(2)
    );
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "verify",
        "--suite",
        "exel-laca",
        "--window",
        "-4..4",
        "--particles",
        "3",
    ];
    assert_eq!(wmono(&args).stdout, wmono(&args).stdout);
    let args = [
        "rewrite",
        "--case",
        "z",
        "--expr",
        "a(2)c(2)c(1)a(0) + c(3)a(3)",
        "--show-steps",
    ];
    assert_eq!(wmono(&args).stdout, wmono(&args).stdout);
}

#[test]
fn out_file_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = wmono(&[
        "--timing",
        "--out",
        path.to_str().unwrap(),
        "moments",
        "--expr",
        "x(1)",
        "--max-order",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["runtimeMillis"].is_number());
}
