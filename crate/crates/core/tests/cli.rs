//! The command-line interface: outputs, files and exit codes.

use std::process::{Command, Output};

use loconc::harness::read_csv;

fn loconc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loconc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn q_exact_rademacher() {
    let out = loconc(&[
        "q",
        "--dist",
        r#"{"type":"rademacher"}"#,
        "--coeffs",
        "[1,1,1,1]",
        "--lambda",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"], 0.375);
    assert_eq!(v["method"], "exact");
}

#[test]
fn q_monte_carlo_reports_band() {
    let out = loconc(&[
        "q",
        "--dist",
        r#"{"type":"uniform","a":-1,"b":1}"#,
        "--coeffs",
        "[1,1]",
        "--lambda",
        "0.5",
        "--method",
        "monte-carlo",
        "--count",
        "20000",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["method"], "monte-carlo");
    assert!(v["ci_half_width"].as_f64().unwrap() > 0.0);
    // triangular density peaks at 1/2, so a window of 0.5 holds at most 1/4
    assert!(v["value"].as_f64().unwrap() <= 0.25 + v["ci_half_width"].as_f64().unwrap());
}

#[test]
fn lcd_and_alpha() {
    let out = loconc(&["lcd", "--coeffs", "[1,1,1,1]", "--gamma", "0.5", "--alpha", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kind"], "finite");
    assert!((v["value"].as_f64().unwrap() - 0.9).abs() <= 1e-6);

    let out = loconc(&[
        "lcd",
        "--coeffs",
        "[1, 1.4142135623730951]",
        "--gamma",
        "0.1",
        "--alpha",
        "0.01",
        "--tmax",
        "10",
    ]);
    assert_eq!(json(&out)["kind"], "beyond");

    let out = loconc(&["alpha", "--coeffs", "[1]", "--tlo", "0.5", "--thi", "0.5"]);
    assert_eq!(json(&out)["lower"], 0.5);
}

#[test]
fn bound_sentinel_and_value() {
    let out = loconc(&[
        "bound",
        "--params",
        r#"{"which":"fs","a_norm":2,"D":1,"alpha":1,"p":0}"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rhs"]["kind"], "vacuous");
    let out = loconc(&[
        "bound",
        "--params",
        r#"{"which":"thm1","a_norm":2,"alpha":0,"M1":0.25}"#,
    ]);
    let v = json(&out);
    let rhs = &v["rhs"];
    assert_eq!(rhs["algebraic"], 1.0);
    assert_eq!(rhs["exponential"], 1.0);
}

#[test]
fn invalid_input_exits_two() {
    let out = loconc(&[
        "q",
        "--dist",
        r#"{"type":"bernoulli","p":2}"#,
        "--coeffs",
        "[1]",
        "--lambda",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = loconc(&[
        "q",
        "--dist",
        "/nonexistent/law.json",
        "--coeffs",
        "[1]",
        "--lambda",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = loconc(&[
        "bound",
        "--params",
        r#"{"which":"thm2","a_norm":1,"gamma":1.5,"alpha":1,"M1":0.5}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_csv_and_reads_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"experiments":[
            {"id":"r8","dist":{"type":"rademacher"},"coeffs":{"type":"arith","n":8,"base":1,"step":0.37},
             "normalize":"max","lambdas":[0.5,1],"bounds":["thm1","eq4","kr","esseen"]}
        ]}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = loconc(&["run", "--spec", spec.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["summary"]["rows"], 8);
    let rows = read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 8);
    let code = if rows.iter().all(|r| r.satisfied) { 0 } else { 1 };
    assert_eq!(out.status.code(), Some(code));

    // identical runs write identical bytes
    let again = dir.path().join("again.csv");
    loconc(&[
        "run",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn run_with_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    // a tiny front constant and a huge rate make the bound fail
    let spec = r#"{"experiments":[{"id":"x","dist":{"type":"rademacher"},"coeffs":[1,1,1,1],"lambdas":[2],"bounds":["thm1"],
        "arith":{"alpha_tol":1e-4}}],"constants":{"fixed":{"C_front":1e-6,"c_exp":100}}}"#;
    let out = loconc(&["run", "--spec", spec, "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["summary"]["violations"], 1);
}

#[test]
fn verify_quadrature_suite() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("quad.csv");
    let out = loconc(&["verify", "--suite", "quadrature", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "quadrature: pass");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("suite,check,observed,limit,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
    let out = loconc(&["verify", "--suite", "nope", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
