//! End-to-end runs of the command line front end.

use std::path::Path;

use crate::cli::run;
use serde_json::Value;

fn concentrate(args: &[&str]) -> i32 {
    run(std::iter::once("concentrate").chain(args.iter().copied()))
}

fn report(dir: &Path, command: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(format!("{command}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn unknown_example_is_a_usage_error() {
    assert_eq!(concentrate(&["analyze", "--example", "nope"]), 2);
}

#[test]
fn malformed_param_is_a_usage_error() {
    assert_eq!(
        concentrate(&["decompose", "--example", "bubbles", "--param", "count"]),
        2
    );
    assert_eq!(
        concentrate(&["verify", "--example", "bubbles", "--check", "nope"]),
        2
    );
}

#[test]
fn elementary_check_below_three_is_an_expected_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let code = concentrate(&[
        "verify",
        "--example",
        "spreading-lp",
        "--p",
        "2.5",
        "--check",
        "elementary",
        "--out",
        out,
    ]);
    assert_eq!(code, 0);
    let r = report(tmp.path(), "verify");
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["result"]["all_pass"], true);
    let detail = r["result"]["checks"][0]["detail"].as_str().unwrap();
    assert!(detail.starts_with("expected failure"), "{detail}");
    assert!(tmp.path().join("verify_checks.csv").exists());
}

#[test]
fn failed_check_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(
        concentrate(&["verify", "--example", "nonadditive-09", "--out", out]),
        1
    );
    let r = report(tmp.path(), "verify");
    assert_eq!(r["result"]["all_pass"], false);
    assert!(!r["result"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn analyze_reads_an_input_file() {
    let tmp = tempfile::tempdir().unwrap();
    // A fixed element with shrinking noise on 4 sites: converges in norm.
    let elements: Vec<Vec<f64>> = (0..16)
        .map(|k| {
            let e = 0.5f64.powi(k);
            vec![1.0 + e, -0.5, 0.25 - e, 0.0]
        })
        .collect();
    let input = serde_json::json!({
        "space": {"p": 2.0, "geometry": {"kind": "sequence", "first": 0, "last": 3}},
        "elements": elements,
    });
    let path = tmp.path().join("input.json");
    std::fs::write(&path, input.to_string()).unwrap();
    let out = tmp.path().join("out");
    let code = concentrate(&[
        "analyze",
        "--input",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r = report(&out, "analyze");
    let limit = r["result"]["weak_limit"]["limit"]["coeffs"]
        .as_array()
        .unwrap();
    let expected = [1.0, -0.5, 0.25, 0.0];
    for (c, e) in limit.iter().zip(expected) {
        assert!((c.as_f64().unwrap() - e).abs() < 1e-3, "{limit:?}");
    }
    assert!(out.join("analyze_series.csv").exists());
}

#[test]
fn input_with_unknown_fields_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.json");
    std::fs::write(&path, r#"{"elements": [[1.0]], "extra": 1}"#).unwrap();
    assert_eq!(
        concentrate(&[
            "analyze",
            "--input",
            path.to_str().unwrap(),
            "--space",
            "sequence",
            "--window",
            "0,0"
        ]),
        2
    );
}
