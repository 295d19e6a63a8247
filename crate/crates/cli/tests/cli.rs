use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hyperalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperalg")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn read_report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

const GAUSSIAN: &str = r#"{"kind": "catalog", "name": "exp_square", "a": [1.0, 0.0]}"#;

#[test]
fn classify_cos_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"symbol": {"kind": "catalog", "name": "cos", "scale": [1.0, 0.0]},
            "experiment": {"command": "classify", "params": {}}}"#,
    );
    let out = dir.path().join("out");
    let o = hyperalg(&["classify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_report(&out);
    assert_eq!(r["schema"], "hyperalg-report/1");
    assert_eq!(r["outcome"]["type"], "verdict");
    assert_eq!(r["outcome"]["value"]["outcome"], "has_algebra");
    assert_eq!(r["outcome"]["value"]["route"], "second_derivative_progression");
}

#[test]
fn witness_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.json",
        &format!(r#"{{"symbol": {GAUSSIAN}, "experiment": {{"command": "witness", "params": {{"options": {{"m": 2}}}}}}}}"#),
    );
    let wdir = dir.path().join("w");
    let o = hyperalg(&["witness", "--config", &cfg, "--out", wdir.to_str().unwrap(), "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_report(&wdir);
    assert_eq!(r["config"]["seed"], 11);
    assert!(r["outcome"]["value"]["targets"][0]["residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(r["side_files"], serde_json::json!(["theta.csv", "trace.csv"]));
    assert!(fs::read_to_string(wdir.join("trace.csv")).unwrap().starts_with("q,max_residual"));

    let report = wdir.join("report.json");
    let vcfg = write_config(
        dir.path(),
        "v.json",
        &format!(
            r#"{{"symbol": {GAUSSIAN}, "experiment": {{"command": "verify", "params": {{"report": {:?}}}}}}}"#,
            report.to_str().unwrap()
        ),
    );
    let vdir = dir.path().join("v");
    let o = hyperalg(&["verify", "--config", &vcfg, "--out", vdir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_report(&vdir);
    assert_eq!(v["outcome"]["value"]["passed"], true);
    assert!(fs::read_to_string(vdir.join("orbit_0.csv")).unwrap().starts_with("q,residual"));

    // a wrong power must be caught and reported through the exit status
    let mut tampered = r.clone();
    let q = tampered["outcome"]["value"]["q"].as_u64().unwrap();
    tampered["outcome"]["value"]["q"] = (q - 1).into();
    fs::write(&report, serde_json::to_string(&tampered).unwrap()).unwrap();
    let o = hyperalg(&["verify", "--config", &vcfg, "--out", vdir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(read_report(&vdir)["outcome"]["value"]["passed"], false);
}

#[test]
fn single_power_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.json",
        &format!(r#"{{"symbol": {GAUSSIAN}, "experiment": {{"command": "witness", "params": {{"options": {{"m": 1}}}}}}}}"#),
    );
    let o = hyperalg(&["witness", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema error"));
}

#[test]
fn unknown_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.json",
        &format!(r#"{{"symbol": {GAUSSIAN}, "experiment": {{"command": "witness", "params": {{"options": {{"eps": 1e-3}}}}}}}}"#),
    );
    let o = hyperalg(&["witness", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field"));
}

#[test]
fn subcommand_must_match_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.json",
        &format!(r#"{{"symbol": {GAUSSIAN}, "experiment": {{"command": "classify", "params": {{}}}}}}"#),
    );
    assert_eq!(hyperalg(&["witness", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn hypothesis_failure_exits_nonzero_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cfg = write_config(
        dir.path(),
        "w.json",
        r#"{"symbol": {"kind": "catalog", "name": "exp", "a": [1.0, 0.0]},
            "experiment": {"command": "witness", "params": {}}}"#,
    );
    let o = hyperalg(&["witness", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = read_report(&out);
    assert_eq!(r["outcome"]["type"], "failure");
    assert!(!r["outcome"]["value"]["check"].as_str().unwrap().is_empty());
}

#[test]
fn outcome_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.json",
        &format!(
            r#"{{"symbol": {GAUSSIAN}, "seed": 3,
                "experiment": {{"command": "witness-multi", "params": {{"exponents": [[2, 0], [1, 1], [0, 1]]}}}}}}"#
        ),
    );
    let outcome = |sub: &str| {
        let out = dir.path().join(sub);
        let o = hyperalg(&["witness-multi", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let r = read_report(&out);
        (serde_json::to_string(&r["outcome"]).unwrap(), fs::read(out.join("theta.csv")).unwrap())
    };
    assert_eq!(outcome("a"), outcome("b"));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = hyperalg(&[
        "witness", "--preset", "exp(z^2)", "--epsilon", "1e-4", "--grid-radius", "2", "--grid-samples", "32", "--n-max", "4096",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let opts = &read_report(&out)["config"]["experiment"]["params"]["options"];
    assert_eq!(opts["epsilon"], 1e-4);
    assert_eq!(opts["grid"]["radius"], 2.0);
    assert_eq!(opts["grid"]["samples"], 32);
    assert_eq!(opts["n_max"], 4096);
}

#[test]
fn analyze_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = hyperalg(&["analyze", "--preset", "cos", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_report(&out);
    let order = r["outcome"]["value"]["growth"]["order"].as_f64().unwrap();
    assert!((order - 1.0).abs() < 0.2, "{order}");
    assert!(out.join("growth.csv").exists() && out.join("ray_0.csv").exists());
}

#[test]
fn catalog_lists_presets() {
    let o = hyperalg(&["catalog"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    for n in ["cos", "sin+exp(-z)", "sin(pi z)/(pi z)", "exp(a z)", "exp(z)(1+iz)"] {
        assert!(names.contains(&n), "{n}");
    }
}
