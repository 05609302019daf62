use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_deflator-lab"));
    c.env_remove("DEFLATOR_LAB_SEED");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn scenario(dir: &Path, name: &str) {
    let out = run(dir, &["scenario", name, "--dir", name]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "binomial");
    scenario(dir.path(), "deterministic-drift");

    let ok = run(dir.path(), &["check", "--tree", "binomial/tree.json", "--price", "S", "--na1"]);
    assert_eq!(ok.status.code(), Some(0));
    let r = report(&ok);
    assert_eq!(r["schema_version"], "1");
    assert_eq!(r["optimal_value"], "3/2");
    assert_eq!(r["config"]["lp_pivot_rule"], "bland");
    assert_eq!(r["provenance"]["module"], "arbitrage");

    let fail = run(dir.path(), &["check", "--tree", "deterministic-drift/tree.json", "--price", "S"]);
    assert_eq!(fail.status.code(), Some(1));
    let r = report(&fail);
    assert_eq!(r["pass"], false);
    assert_eq!(r["optimal_value"], "+inf");
    assert!(r["na1_witness_ray"].is_object());

    let missing = run(dir.path(), &["check", "--tree", "absent.json", "--price", "S"]);
    assert_eq!(missing.status.code(), Some(2));

    std::fs::write(dir.path().join("bad.json"), r#"{"bad": 1}"#).unwrap();
    let bad = run(dir.path(), &["check", "--tree", "bad.json", "--price", "S"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`horizon`"));

    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn deflate_then_foellmer_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "binomial");
    let out = run(
        dir.path(),
        &["deflate", "--tree", "binomial/tree.json", "--price", "S", "--out", "with_z.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["z0"], "3/2");

    let text = std::fs::read_to_string(dir.path().join("with_z.json")).unwrap();
    let parsed = deflator_lab::io::TreeFile::parse(&text).unwrap();
    assert_eq!(parsed.to_json_string(), text);
    assert!(parsed.process("Z").is_ok());

    let out = run(
        dir.path(),
        &["foellmer", "--tree", "with_z.json", "--deflator", "Z", "--normalize", "--out", "points.json"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let points: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("points.json")).unwrap()).unwrap();
    let masses: Vec<&str> = points["points"].as_array().unwrap().iter().map(|p| p["mass"].as_str().unwrap()).collect();
    assert!(masses.contains(&"1/6") && masses.contains(&"1/3"), "{masses:?}");
}

#[test]
fn singleton_foellmer_splits_mass() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "singleton-supermartingale");
    let out = run(
        dir.path(),
        &["foellmer", "--tree", "singleton-supermartingale/tree.json", "--deflator", "Z", "--out", "q.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let q: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("q.json")).unwrap()).unwrap();
    let masses: Vec<&str> = q["points"].as_array().unwrap().iter().map(|p| p["mass"].as_str().unwrap()).collect();
    assert_eq!(masses.iter().filter(|m| **m == "1/2").count(), 2, "{masses:?}");
}

#[test]
fn stopped_check_reports_drift() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "exponential-death");
    let out = run(dir.path(), &["stopped-check", "--tree", "exponential-death/tree.json", "--price", "S", "--deflator", "Z"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn enlargement_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "insider-binomial");
    let base = ["--tree", "insider-binomial/tree.json", "--label-map", "insider-binomial/labels.json"];
    for sub in ["jacod", "universal-z"] {
        let mut args = vec!["enlarge", sub];
        args.extend(base);
        assert_eq!(run(dir.path(), &args).status.code(), Some(0), "{sub}");
    }
    let mut args = vec!["enlarge", "insider"];
    args.extend(base);
    args.extend(["--price", "S", "--event", "up"]);
    let out = run(dir.path(), &args);
    let r = report(&out);
    assert_eq!(r["farkas_certificate_verified"], true);
    assert_eq!(r["na1_under_g_strict"], false);
    assert_eq!(r["na1_under_g_robust"], true);
    let mut args = vec!["enlarge", "logutility"];
    args.extend(base);
    args.extend(["--price", "S"]);
    assert_eq!(run(dir.path(), &args).status.code(), Some(0));
}

#[test]
fn seed_environment_override() {
    let dir = tempfile::tempdir().unwrap();
    let a = bin()
        .current_dir(dir.path())
        .env("DEFLATOR_LAB_SEED", "99")
        .args(["simulate", "--scenario", "levy", "--paths", "200"])
        .output()
        .unwrap();
    let a = report(&a);
    assert_eq!(a["config"]["resolved"]["seed"], 99);
    let b = report(&run(dir.path(), &["simulate", "--scenario", "levy", "--paths", "200", "--seed", "99"]));
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn small_samples_are_not_a_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--scenario", "levy", "--paths", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["counterexample"]["raw"]["verdict"], "insufficient_sample");
}

#[test]
fn report_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "singleton-supermartingale");
    let tree = "singleton-supermartingale/tree.json";
    let out = run(dir.path(), &["--report", "r.json", "ky-verify", "--tree", tree, "--hitting", "3", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
}

#[test]
fn unknown_scenario_lists_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["scenario", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("jacod-coins"));
}
