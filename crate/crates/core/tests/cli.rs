use std::process::Command;

use invpde::cli::generate;
use invpde::expr::{normalize, parse_json};
use invpde::invariant::Family;

fn invpde(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_invpde")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn generate_minimal_surface_latex() {
    let (code, out, _) = invpde(&["generate", "--group", "euclidean", "-n", "2", "--poly", "t1", "--format", "latex"]);
    assert_eq!(code, 0);
    let first = out.lines().next().unwrap();
    assert_eq!(first, "u_{1}^{2} u_{22} - 2 u_{1} u_{2} u_{12} + u_{2}^{2} u_{11} + u_{11} + u_{22} = 0");
    assert!(out.contains("(\\sqrt{\\det g})^{3}"));
}

#[test]
fn generate_json_reparses_to_the_library_numerator() {
    for (group, n, poly) in [("euclidean", "2", "1/2*t1^2 - 1/2*t2"), ("conformal", "3", "c2^3 - 6*c3^2"), ("euclidean", "3", "t3")] {
        let (code, out, err) = invpde(&["generate", "--group", group, "-n", n, "--poly", poly, "--format", "json"]);
        assert_eq!(code, 0, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let nn: usize = n.parse().unwrap();
        let e = parse_json(&v["numerator"].to_string()).unwrap();
        let lib = generate(group.parse::<Family>().unwrap(), nn, poly).unwrap();
        assert_eq!(normalize(&e, nn).unwrap(), lib.numerator_expr());
    }
}

#[test]
fn invariants_of_the_zero_jet() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    std::fs::write(&path, r#"{"n":2,"u":0,"x":[0,0],"du":[0,0],"d2u":[[0,0],[0,0]]}"#).unwrap();
    let path = path.to_str().unwrap();
    let (code, out, _) = invpde(&["invariants", "--group", "euclidean", "-n", "2", "--jet", path]);
    assert_eq!(code, 0);
    assert_eq!(out, "t1 = 0\nt2 = 0\n");
    let (code, out, _) = invpde(&["invariants", "--group", "conformal", "-n", "2", "--jet", path, "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["values"]["c2"], 0.0);
    let (code, _, err) = invpde(&["invariants", "--group", "euclidean", "-n", "3", "--jet", path]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn verify_exit_codes() {
    let args = ["verify", "--suite", "euclidean", "-n", "2", "--trials", "1000", "--tol", "1e-9", "--seed", "7"];
    let (code, out, _) = invpde(&args);
    assert_eq!(code, 0);
    assert_eq!(invpde(&args).1, out);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["failures"], 0);
    // a tolerance below rounding error must fail
    let (code, _, _) = invpde(&["verify", "--suite", "conformal", "-n", "3", "--trials", "50", "--tol", "0", "--seed", "1"]);
    assert_eq!(code, 1);
    let (code, _, _) = invpde(&["verify", "--suite", "euclidean", "-n", "2", "--trials", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(invpde(&["generate", "--group", "euclidean", "-n", "2"]).0, 2);
    assert_eq!(invpde(&["generate", "--group", "euclidean", "-n", "2", "--poly", "t1 +"]).0, 2);
    let (code, _, err) = invpde(&["generate", "--group", "conformal", "-n", "3", "--poly", "c2 + c3"]);
    assert_eq!(code, 2);
    assert!(err.contains("homogeneous"), "{err}");
    assert_eq!(invpde(&["--help"]).0, 0);
}
