use std::process::{Command, Output};

fn mahler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mahler")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    mahler(args).status.code().unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = args.to_vec();
    a.push("--json");
    let out = mahler(&a);
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["measure", "x+y+1"]), 0);
    assert_eq!(code(&["measure", "x+"]), 2);
    assert_eq!(code(&["measure", "x", "--nodes", "6"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["measure", "0"]), 3);
    assert_eq!(code(&["transform", "x+y", "--var", "x", "--g", "x+2", "--k", "1"]), 4);
    assert_eq!(code(&["transform", "x+y", "--var", "x", "--g", "2*x+1", "--k", "2"]), 4);
    assert_eq!(code(&["transform", "y+1", "--var", "x", "--g", "x+2", "--k", "2"]), 4);
    assert_eq!(code(&["verify", "--lhs", "x+y+1", "--rhs-value", "0.3"]), 5);
    assert_eq!(code(&["verify", "nonsense"]), 2);
}

#[test]
fn measure_values() {
    let v = json(&["measure", "5"]);
    assert!((v["results"]["value"].as_f64().unwrap() - 5f64.ln()).abs() < 1e-15);
    let v = json(&["measure", "(1-x)/(1+x)"]);
    assert!(v["results"]["value"].as_f64().unwrap().abs() < 1e-12);
    let v = json(&["measure", "x+y+1", "--method", "direct"]);
    assert_eq!(v["results"]["method"], "direct");
    assert!((v["results"]["value"].as_f64().unwrap() - 0.3230659472).abs() < 1e-6);
}

#[test]
fn transform_reports_cleared_numerator() {
    let v = json(&["transform", "x+1+(x-1)*(y+z)", "--var", "x", "--g", "x+2", "--k", "2"]);
    assert_eq!(v["results"]["cleared_numerator"], "2*x^2*y + 2*x^2*z + 2*x^2 + 2*x - 2*y - 2*z + 2");
    assert_eq!(v["results"]["ell"], 1);
    assert!((v["results"]["correction"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn conjectural_entries_never_fail() {
    let out = mahler(&["verify", "l21", "--rhs-value", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("conjectural"));
    assert!(text.contains("0.100000000000"));
}

#[test]
fn closed_form_values() {
    let v = json(&["closed-form", "R", "1"]);
    let want = 2.0 * 0.915965594177219 / std::f64::consts::PI;
    assert!((v["results"]["value"].as_f64().unwrap() - want).abs() < 1e-12);
    assert_eq!(code(&["closed-form", "R", "0"]), 2);
    assert_eq!(code(&["closed-form", "Q", "1"]), 2);
}

#[test]
fn config_file_and_seed_precedence() {
    let path = std::env::temp_dir().join(format!("mahler-cli-test-{}.toml", std::process::id()));
    std::fs::write(&path, "seed = 42\nshifts = 4\ntotal_nodes = 1000\n").unwrap();
    let cfg = path.to_str().unwrap();
    let v = json(&["measure", "x+y+z+w+1", "--config", cfg]);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["results"]["rule"]["shifts"], 4);
    let v = json(&["measure", "x+y+z+w+1", "--config", cfg, "--seed", "5"]);
    assert_eq!(v["seed"], 5);
    let out = Command::new(env!("CARGO_BIN_EXE_mahler"))
        .args(["measure", "x+y+z+w+1", "--total-nodes", "1000", "--json"])
        .env("MAHLER_SEED", "77")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 77);
    std::fs::write(&path, "bogus = 1\n").unwrap();
    assert_eq!(code(&["measure", "x", "--config", cfg]), 2);
    std::fs::remove_file(&path).ok();
}

#[test]
fn catalog_lists_thirteen_identities() {
    let v = json(&["catalog"]);
    assert_eq!(v["results"].as_array().unwrap().len(), 13);
}
