use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn agcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agcurv")).args(args).output().expect("spawn agcurv")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn gen(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let p = dir.join(name);
    let mut args = vec!["gen", "--out", p.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = agcurv(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn generated_manifest_passes_every_command() {
    let dir = TempDir::new().unwrap();
    let m = gen(dir.path(), "m.json", &["--n", "2", "--seed", "3", "--hypersurface"]);
    let ms = m.to_str().unwrap();
    for cmd in ["validate", "build", "classify", "hypersurface"] {
        let o = agcurv(&[cmd, ms]);
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let r = report(&o);
        assert_eq!(r["command"], cmd);
        assert_eq!(r["ok"], true);
        assert_eq!(r["input_sha256"].as_str().unwrap().len(), 64);
    }
    let o = agcurv(&["audit", "--manifest", ms]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["report"]["audit"]["5.4"]["verdict"], "pass");
    assert_eq!(r["report"]["audit"]["2.6"]["verdict"], "pass");
}

#[test]
fn build_reports_formula_agreement_and_tensors() {
    let dir = TempDir::new().unwrap();
    let m = gen(dir.path(), "m.json", &["--n", "1", "--kind", "zero"]);
    let o = agcurv(&["build", m.to_str().unwrap(), "--ricci", "formula", "--tensors"]);
    assert_eq!(code(&o), 0);
    let r = &report(&o)["report"];
    assert!(r["ricci_formula_vs_contraction"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["riemann"].as_array().unwrap().len(), 3);
    assert_eq!(r["scalar_curvature"].as_f64().unwrap(), -6.0);
}

#[test]
fn classify_recovers_zero_structure_constants() {
    let dir = TempDir::new().unwrap();
    let m = gen(dir.path(), "z.json", &["--n", "2", "--kind", "zero"]);
    let r = report(&agcurv(&["classify", m.to_str().unwrap()]));
    let c = &r["report"]["constants"];
    assert!((c["lambda"]["value"].as_f64().unwrap() + 4.0).abs() < 1e-12);
    assert!(c["mu"]["value"].as_f64().unwrap().abs() < 1e-12);
    assert!((c["scalar_curvature"]["value"].as_f64().unwrap() + 20.0).abs() < 1e-12);
    assert_eq!(r["report"]["flags"]["einstein"], true);
}

#[test]
fn audit_findings_carry_witnesses() {
    let dir = TempDir::new().unwrap();
    let m = gen(dir.path(), "p.json", &["--n", "2", "--kind", "phi-semisymmetric-nonflat"]);
    let o = agcurv(&["audit", "--manifest", m.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "findings are not check failures");
    let r = &report(&o)["report"];
    let f = r["findings"].as_array().unwrap();
    assert!(f.iter().any(|x| x["theorem"] == "4.4" && x["direction"] == "forward"));
    assert!(r["witnesses"]["instance"]["structure"]["B3u"].is_array());
}

#[test]
fn out_file_round_trips() {
    let dir = TempDir::new().unwrap();
    let m = gen(dir.path(), "m.json", &[]);
    let out = dir.path().join("r.json");
    let o = agcurv(&["classify", m.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
}

#[test]
fn batch_audit_is_reproducible() {
    let a = agcurv(&["audit", "--trials", "2", "--seed", "5", "--n", "2"]);
    let b = agcurv(&["audit", "--trials", "2", "--seed", "5", "--n", "2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = agcurv(&["audit", "--trials", "2", "--seed", "6", "--n", "2"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn malformed_manifest_names_the_field_and_exits_2() {
    let dir = TempDir::new().unwrap();
    let m = gen(dir.path(), "m.json", &["--n", "2"]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    v["structure"]["B3u"][0].as_array_mut().unwrap().pop();
    std::fs::write(&m, v.to_string()).unwrap();
    let o = agcurv(&["validate", m.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("structure.B3u[0]"));
}

#[test]
fn inadmissible_manifest_exits_1() {
    let dir = TempDir::new().unwrap();
    let m = gen(dir.path(), "m.json", &["--n", "2", "--seed", "1"]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    v["structure"]["A22"][0][1][0][1] = serde_json::json!([5.0, 0.0]);
    v["options"]["enforce_conjugate_pairs"] = serde_json::json!(false);
    std::fs::write(&m, v.to_string()).unwrap();
    let o = agcurv(&["validate", m.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["report"]["admissible"], false);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&agcurv(&["frobnicate"])), 2);
    assert_eq!(code(&agcurv(&[])), 2);
    assert_eq!(code(&agcurv(&["validate", "/nonexistent/m.json"])), 2);
    assert_eq!(code(&agcurv(&["audit", "--n", "0"])), 2);
    assert_eq!(code(&agcurv(&["--help"])), 0);
}

#[test]
fn missing_hypersurface_section_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let m = gen(dir.path(), "m.json", &[]);
    let o = agcurv(&["hypersurface", m.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hypersurface"));
}

#[test]
fn tolerance_environment_override_reaches_reports() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("m.json");
    let o = Command::new(env!("CARGO_BIN_EXE_agcurv"))
        .args(["gen", "--out", m.to_str().unwrap()])
        .env("AGCURV_TOLERANCE", "1e-6")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(v["options"]["tolerance"].as_f64().unwrap(), 1e-6);
    let mut v = v;
    v["options"].as_object_mut().unwrap().remove("tolerance");
    std::fs::write(&m, v.to_string()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_agcurv"))
        .args(["classify", m.to_str().unwrap()])
        .env("AGCURV_TOLERANCE", "1e-4")
        .output()
        .unwrap();
    assert_eq!(report(&o)["report"]["tolerance"].as_f64().unwrap(), 1e-4);
}
