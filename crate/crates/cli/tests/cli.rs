use std::path::Path;
use std::process::{Command, Output};

use fischer_core::json::{parse_poly, AnyPoly};
use fischer_core::{GaussRat, Poly};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fischer-lab"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).env_remove("FISCHER_LAB_THREADS").output().expect("binary runs")
}

fn payload(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(v["tool"], "fischer-lab");
    v["payload"].clone()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn setup() -> TempDir {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "p.json", r#"{"dim":2,"terms":[{"exp":[2,0],"re":"1"},{"exp":[0,0],"re":"-1"}]}"#);
    write(dir.path(), "f.json", r#"{"dim":2,"terms":[{"exp":[2,0],"re":"1"}]}"#);
    write(dir.path(), "lap.json", r#"{"dim":2,"terms":[{"exp":[2,0],"re":"1"},{"exp":[0,2],"re":"1"}]}"#);
    write(dir.path(), "exp.json", r#"{"kind":"exp_poly","inner":{"dim":1,"terms":[{"exp":[1],"re":"1"}]}}"#);
    dir
}

#[test]
fn decompose_writes_quotient_and_remainder_files() {
    let dir = setup();
    let out = run(&["decompose", "--p", "p.json", "--f", "f.json", "--backend", "exact", "--series-check", "--out-dir", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let one = AnyPoly::Exact(Poly::<GaussRat>::one(2));
    for name in ["q.json", "r.json"] {
        let text = std::fs::read_to_string(dir.path().join("res").join(name)).unwrap();
        assert_eq!(parse_poly(&text).unwrap(), one, "{name}");
    }
    let diag: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["verb"], "decompose");
    assert_eq!(diag["payload"]["series_check"]["agrees"], true);
    assert_eq!(diag["payload"]["method"], "direct");
}

#[test]
fn method_is_selected_from_the_shape_of_p() {
    let dir = setup();
    write(dir.path(), "lin.json", r#"{"dim":2,"terms":[{"exp":[1,0],"re":"1"},{"exp":[0,1],"re":"1"},{"exp":[0,0],"re":"-1"}]}"#);
    write(dir.path(), "uni.json", r#"{"dim":1,"terms":[{"exp":[2],"re":"1"},{"exp":[0],"re":"-1"}]}"#);
    write(dir.path(), "cube.json", r#"{"dim":1,"terms":[{"exp":[3],"re":"1"}]}"#);
    let cases = [("lin.json", "lin.json", "linear_shift"), ("lap.json", "f.json", "homogeneous"), ("uni.json", "cube.json", "univariate")];
    for (p, f, method) in cases {
        let out = run(&["decompose", "--p", p, "--f", f], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(payload(&out)["method"], method);
    }
}

#[test]
fn envelope_fields_come_in_fixed_order() {
    let dir = setup();
    let out = run(&["inner", "--p", "p.json", "--q", "f.json"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let positions: Vec<usize> = ["\"tool\"", "\"version\"", "\"verb\"", "\"payload\""].iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["payload"]["inner"]["re"], "2");
    assert_eq!(v["payload"]["norm_sq_p"], "3");
}

#[test]
fn classify_degenerate_square() {
    let dir = setup();
    let out = run(&["classify2x2", "1", "2", "1"], dir.path());
    let p = payload(&out);
    assert_eq!(p["degenerate"], true);
    assert_eq!(p["witness_direction"], serde_json::json!([[1.0, 0.0], [-1.0, 0.0]]));
    let out = run(&["classify2x2", "1", "-1", "1"], dir.path());
    assert_eq!(payload(&out)["degenerate"], false);
}

#[test]
fn verify_passes_on_random_cases() {
    let dir = setup();
    let out = run(&["verify", "--seed", "7", "--cases", "200"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let p = payload(&out);
    assert_eq!(p["passed"], true);
    assert_eq!(p["checks"].as_array().unwrap().len(), 7);
}

#[test]
fn verify_accepts_supplied_inputs() {
    let dir = setup();
    let out = run(&["verify", "--p", "lap.json", "--f", "f.json", "--cases", "5"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["verify", "--p", "p.json", "--f", "f.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_deterministic_across_runs_and_thread_counts() {
    let dir = setup();
    let args = ["verify", "--seed", "3", "--cases", "40"];
    let reference = run(&args, dir.path()).stdout;
    for threads in ["1", "4"] {
        let out = bin().args(args).current_dir(dir.path()).env("FISCHER_LAB_THREADS", threads).output().unwrap();
        assert_eq!(out.stdout, reference, "threads = {threads}");
    }
}

#[test]
fn ks_fit_writes_csv_and_report_file() {
    let dir = setup();
    let out = run(&["ks-fit", "--p", "lap.json", "--csv", "sweep.csv", "--out", "report.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("m,sigma_min,sigma_max"));
    assert_eq!(csv.lines().count(), 1 + 33);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let tau = report["payload"]["fitted_tau"].as_f64().unwrap();
    assert!((0.85..=1.15).contains(&tau), "tau = {tau}");
    let names: Vec<String> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(names.iter().all(|n| !n.starts_with(".tmp")), "leftover temporary file in {names:?}");
}

#[test]
fn spectrum_and_kernel() {
    let dir = setup();
    let out = run(&["spectrum", "--p", "lap.json", "--m-min", "0", "--m-max", "3"], dir.path());
    let p = payload(&out);
    assert_eq!(p["degrees"], serde_json::json!([0, 1, 2, 3]));
    let out = run(&["kernel", "--p", "lap.json", "--m", "2"], dir.path());
    assert_eq!(payload(&out)["dimension"], 2);
}

#[test]
fn entire_stream_verbs() {
    let dir = setup();
    let out = run(&["order", "--f", "exp.json"], dir.path());
    let order = payload(&out)["order"].as_f64().unwrap();
    assert!((order - 1.0).abs() < 0.1, "order = {order}");
    let out = run(&["blambda", "--f", "exp.json", "--m-cap", "100", "--k", "2", "--tau", "1", "--beta", "0", "--rho", "3"], dir.path());
    let p = payload(&out);
    assert_eq!(p["report"]["trend"], "consistent_with_membership");
    assert_eq!(p["main_condition"]["holds"], true);
    write(dir.path(), "zm1.json", r#"{"dim":1,"terms":[{"exp":[1],"re":"1"},{"exp":[0],"re":"-1"}]}"#);
    let out = run(&["decompose", "--p", "zm1.json", "--f", "exp.json", "--m-cap", "30", "--backend", "float"], dir.path());
    let p = payload(&out);
    let r = p["r"]["terms"].as_array().unwrap();
    let constant = r.iter().find(|t| t["exp"] == serde_json::json!([0])).unwrap();
    assert!((constant["re"].as_f64().unwrap() - std::f64::consts::E).abs() < 1e-12);
}

#[test]
fn exit_codes_follow_failure_class() {
    let dir = setup();
    write(dir.path(), "bad.json", r#"{"dim": 2"#);
    assert_eq!(run(&["inner", "--p", "bad.json", "--q", "f.json"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["inner", "--p", "missing.json", "--q", "f.json"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["decompose", "--p", "lap.json", "--f", "f.json", "--method", "linear"], dir.path()).status.code(), Some(3));
    assert_eq!(run(&["decompose", "--p", "p.json", "--f", "exp.json"], dir.path()).status.code(), Some(3));
    assert_eq!(run(&["ks-fit", "--p", "lap.json", "--m-min", "8", "--m-max", "9"], dir.path()).status.code(), Some(3));
    let out = bin().args(["verify", "--cases", "1"]).current_dir(dir.path()).env("FISCHER_LAB_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}
