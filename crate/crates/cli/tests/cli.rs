use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn multispace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multispace")).args(args).output().expect("spawn multispace")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn samples(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn interp_reports_both_forms() {
    let dir = TempDir::new().unwrap();
    let f = samples(&dir, "s.csv", "x,u\n# quadratic\n0,1\n1,3\n2,9\n");
    let out = multispace(&["interp", p(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["monomial"], "1 + 2*x^2");
    assert_eq!(v["points"], 3);
    assert_eq!(v["reproduces_samples"], true);
}

#[test]
fn interp_duplicate_abscissa_names_lines() {
    let dir = TempDir::new().unwrap();
    let f = samples(&dir, "d.csv", "x,u\n0,1\n1,3\n1,9\n");
    let out = multispace(&["interp", p(&f)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lines 3 and 4"), "{err}");
}

#[test]
fn prolong_jet_rotation_all_forms() {
    let out = multispace(&["prolong-jet", "--action", "rotation", "--order", "3", "--all-forms"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["agree"], true);
    assert_eq!(v["recursive"], serde_json::json!(["x", "1 + u1^2", "3*u1*u2", "3*u2^2 + 4*u1*u3"]));
}

#[test]
fn prolong_jet_scaling_pattern() {
    let out = multispace(&["prolong-jet", "--xi", "-x", "--phi", "u", "--order", "4"]);
    let v = json(&out);
    for k in 1..=4 {
        assert_eq!(v[k], format!("{}*u{k}", k + 1));
    }
}

#[test]
fn prolong_multi_scaling_and_rotation() {
    let dir = TempDir::new().unwrap();
    let a = samples(&dir, "a.csv", "x,u\n0,0\n1,3\n");
    let v = json(&multispace(&["prolong-multi", "--action", "scaling", p(&a), "--order", "1"]));
    assert_eq!(v["equal"], true);
    assert_eq!(v["direct"]["phibracket"][1], "6");

    let b = samples(&dir, "b.csv", "x,u\n0,0\n1,1\n");
    let v = json(&multispace(&["prolong-multi", "--xi", "-u", "--phi", "x", p(&b), "--order", "1", "--method", "recursive"]));
    assert_eq!(v["phibracket"][1], "2");
}

#[test]
fn prolong_multi_finite_action() {
    let dir = TempDir::new().unwrap();
    let s = samples(&dir, "s.csv", "x,u\n0,1\n1/2,3\n2,-1\n");
    let fin = json(&multispace(&["prolong-multi", "--action", "projective", p(&s), "--order", "2", "--method", "finite-action"]));
    let dir_ = json(&multispace(&["prolong-multi", "--action", "projective", p(&s), "--order", "2", "--method", "direct"]));
    assert_eq!(fin["phibracket"], dir_["phibracket"]);

    let out = multispace(&["prolong-multi", "--action", "rotation", p(&s), "--order", "1", "--method", "finite-action"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn prolong_multi_order_overflow() {
    let dir = TempDir::new().unwrap();
    let s = samples(&dir, "s.csv", "x,u\n0,1\n1,2\n");
    let out = multispace(&["prolong-multi", "--action", "scaling", p(&s), "--order", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn coalesce_rotation_order1_is_reported() {
    let out = multispace(&["coalesce", "--action", "rotation", "--curve", "x^5", "--x", "1", "--order", "1"]);
    let v = json(&out);
    assert_eq!(v["oracle"], "26");
    assert!((v["limit"].as_f64().unwrap() - 26.0).abs() < 1e-6);
    // single-sweep error sits just above the 1e-8 gate
    assert_eq!(v["pass"], false);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn coalesce_coordinate_passes() {
    let out = multispace(&["coalesce", "--target", "coordinate", "--curve", "x^5", "--x", "1", "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["oracle"], "20");
}

#[test]
fn coalesce_singular_curve() {
    let out = multispace(&["coalesce", "--action", "rotation", "--curve", "1/(x-1)", "--x", "1", "--order", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("h = "));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(multispace(&["--precision-bits", "64", "verify"]).status.code(), Some(2));
    assert_eq!(multispace(&["prolong-jet", "--xi", "x+", "--phi", "u", "--order", "1"]).status.code(), Some(2));
    assert_eq!(multispace(&["prolong-jet", "--action", "shear", "--order", "1"]).status.code(), Some(2));
    assert_eq!(multispace(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_identities_pass() {
    let out = multispace(&["verify", "--suite", "identities", "--trials", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (out, seq) in [(&a, false), (&b, true)] {
        let mut args = vec!["verify", "--suite", "oracles", "--trials", "6", "--seed", "7", "--out", p(out)];
        if seq {
            args.push("--sequential");
        }
        assert_eq!(multispace(&args).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn csv_format() {
    let dir = TempDir::new().unwrap();
    let s = samples(&dir, "s.csv", "x,u\n0,0\n1,3\n");
    let out = multispace(&["--format", "csv", "prolong-multi", "--action", "scaling", p(&s), "--order", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("method,k,xi,phi,phibracket"));
    assert!(text.contains("recursive,1,-1,3,6"));
}
