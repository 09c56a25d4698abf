use std::process::{Command, Output};

use serde_json::Value;

fn qaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qaw")).args(args).env_remove("QAW_DEFAULT_TOL").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr_line(out: &Output) -> String {
    let s = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(s.trim_end().lines().count(), 1, "{s}");
    s
}

#[test]
fn eval_q_hermite() {
    let out = qaw(&["eval", "--family", "qh", "--n", "2", "--x", "0.5", "--q", "0.3"]);
    assert!(out.status.success());
    let v = json(&out);
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 0.3).abs() < 1e-15);
    assert_eq!(v["request"]["subcommand"], "eval");
    assert!(v["reports"].as_array().unwrap().is_empty());
}

#[test]
fn rescaled_hermite_at_one() {
    // He_3(x) = x^3 - 3x.
    let out = qaw(&["eval", "--family", "qh", "--rescaled", "--n", "3", "--x", "1.5", "--q", "1"]);
    let v = json(&out)["result"]["value"].as_f64().unwrap();
    assert!((v - (3.375 - 4.5)).abs() < 1e-14);
}

#[test]
fn trivial_connection() {
    let out = qaw(&["coeffs", "--map", "w_to_p", "--nmax", "0", "--y", "0.2", "--rho1", "0.3", "--z", "-0.1", "--rho2", "0.4"]);
    assert!(out.status.success());
    let coeff: Vec<Vec<f64>> = serde_json::from_value(json(&out)["result"]["coeff"].clone()).unwrap();
    assert_eq!(coeff, vec![vec![1.0]]);
}

#[test]
fn verify_normalization() {
    let out = qaw(&["verify", "--suite", "normalization", "--q", "0.5", "--seed", "7"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["passed"], true);
    let reports = v["reports"].as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["seed"] == 7 && r["suite"] == "normalization"));
}

#[test]
fn verify_orders_suites_by_name() {
    let out = qaw(&["verify", "--suite", "ladder,base_inversion,conversion", "--q", "0.3"]);
    assert!(out.status.success());
    let names: Vec<String> =
        json(&out)["result"]["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap().to_owned()).collect();
    assert_eq!(names, ["base_inversion", "conversion", "ladder"]);
}

#[test]
fn validation_errors_exit_two() {
    for args in [
        vec!["eval", "--family", "qh", "--n", "2", "--x", "0.5", "--q", "1.5"],
        vec!["eval", "--family", "aw", "--n", "2", "--x", "0.5", "--q", "0.3", "--a", "0.1", "--y", "0.2"],
        vec!["eval", "--family", "qh", "--n", "2"],
        vec!["eval", "--family", "qh", "--n", "2", "--x", "0.5", "--q", "0.3", "--bogus", "1"],
        vec!["frobnicate"],
        vec!["sample", "--q", "0.5", "--rho1", "1.2", "--rho2", "0", "--n", "10"],
        vec!["verify", "--suite", "nonexistent"],
        vec!["density", "--kind", "f_n", "--q", "0.5", "--x", "abc"],
    ] {
        let out = qaw(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        stderr_line(&out);
    }
}

#[test]
fn default_tolerance_from_environment() {
    let args = ["density", "--kind", "f_h", "--q", "0.5", "--x", "0.3"];
    let bad = Command::new(env!("CARGO_BIN_EXE_qaw")).args(args).env("QAW_DEFAULT_TOL", "tight").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    stderr_line(&bad);
    let loose = Command::new(env!("CARGO_BIN_EXE_qaw")).args(args).env("QAW_DEFAULT_TOL", "1e-3").output().unwrap();
    let exact = qaw(&args);
    let a = json(&loose)["result"]["points"][0]["density"].as_f64().unwrap();
    let b = json(&exact)["result"]["points"][0]["density"].as_f64().unwrap();
    assert!(a != b && (a - b).abs() < 1e-2 * b);
}

#[test]
fn computation_failure_is_structured() {
    let out = qaw(&["kernel", "--kind", "poisson_mehler", "--x", "0.3", "--q", "0.5", "--y", "0.2", "--rho1", "0.9", "--terms", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["result"]["error"]["kind"], "non_convergence");
}

#[test]
fn seventeen_digits_and_no_nan() {
    let out = qaw(&["density", "--kind", "f_cn", "--q", "0.4", "--grid", "11", "--y", "0.5", "--rho1", "0.3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("NaN") && !text.contains("inf"));
    assert!(text.contains("\"density\": 0.0000000000000000e+0") || text.contains("\"density\": 0.0000000000000000e0"));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["result"]["points"].as_array().unwrap().len(), 11);
}

#[test]
fn sampling_is_deterministic_csv() {
    let args = ["sample", "--q", "0.5", "--rho1", "0.3", "--rho2", "-0.4", "--n", "50", "--seed", "3"];
    let a = qaw(&args);
    let b = qaw(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,x,z"));
    assert_eq!(lines.count(), 50);
    assert!(!text.contains('\r'));
}

#[test]
fn help_lists_ranges() {
    let out = qaw(&["eval", "--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["(-1, 1]", "--rho1", "--a", "0 to 10000"] {
        assert!(text.contains(needle), "{needle}");
    }
}
