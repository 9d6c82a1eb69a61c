use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn strata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_on(cmd: &str, config: &Path, extra: &[&str]) -> (i32, Value, String) {
    let mut args = vec![cmd, config.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = strata(&args);
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report, String::from_utf8_lossy(&out.stderr).into_owned())
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn spider_mean_is_the_apex() {
    let (code, rep, _) = run_on("mean", &fixture("spider.json"), &["--oracle"]);
    assert_eq!(code, 0);
    let r = &rep["result"];
    assert_eq!(r["mean"]["point"], Value::Null);
    assert!((num(&r["value"]) - 0.5).abs() < 1e-12);
    assert_eq!(r["stratum"]["kind"], "spine");
    assert_eq!(r["oracle"]["agree"], true);
    assert_eq!(rep["command"], "mean");
    assert_eq!(rep["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn spider_collapse_is_one_dimensional() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("atoms.csv");
    let (code, rep, _) = run_on("collapse", &fixture("spider.json"), &["--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = &rep["result"];
    assert_eq!(r["m"], 1);
    let mut images: Vec<f64> = r["atoms"].as_array().unwrap().iter().map(|a| num(&a["image"][0])).collect();
    images.sort_by(f64::total_cmp);
    assert_eq!(images, vec![-1.0, 1.0]);
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("index,weight,y0\n"));
}

#[test]
fn theta_collapses_in_two_stages() {
    let (code, rep, _) = run_on("collapse", &fixture("theta.json"), &[]);
    assert_eq!(code, 0);
    let r = &rep["result"];
    assert_eq!(r["codims"], serde_json::json!([2, 1, 0]));
    assert_eq!(r["termination_index"], 1);
    assert_eq!(r["idempotent"], true);
}

#[test]
fn short_kale_is_rejected() {
    let (code, _, err) = run_on("validate", &fixture("kale5.json"), &[]);
    assert_eq!(code, 1);
    assert!(err.contains("CAT(1)"), "{err}");
}

#[test]
fn weights_must_sum_to_one() {
    let (code, _, err) = run_on("validate", &fixture("bad_weights.json"), &[]);
    assert_eq!(code, 1);
    assert!(err.contains("weights sum to 0.9"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("near.json");
    std::fs::write(
        &path,
        r#"{"space": {"spine_dim": 1},
            "measure": {"atoms": [{"u": [0.0], "weight": 0.5000000004},
                                  {"u": [2.0], "weight": 0.5}]}}"#,
    )
    .unwrap();
    let (code, rep, _) = run_on("mean", &path, &[]);
    assert_eq!(code, 0);
    assert!((num(&rep["result"]["mean"]["u"][0]) - 1.0).abs() < 1e-9);
}

#[test]
fn syntax_errors_point_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"space\": {\n  \"gallery\": 3}}").unwrap();
    let (code, _, err) = run_on("mean", &path, &[]);
    assert_eq!(code, 1);
    assert!(err.contains("bad.json:2:"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(strata(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(strata(&["mean"]).status.code(), Some(1));
    assert_eq!(strata(&["--version"]).status.code(), Some(0));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("kale.json");
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("r{i}.json"));
            let (code, _, _) = run_on("fluct", &cfg, &["--seed", "5", "--out", out.to_str().unwrap()]);
            assert_eq!(code, 0);
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let rep: Value = serde_json::from_slice(&outs[0]).unwrap();
    assert_eq!(rep["seed"], 5);
}

#[test]
fn gradient_along_configured_directions() {
    let (code, rep, _) = run_on("grad", &fixture("euclidean.json"), &[]);
    assert_eq!(code, 0);
    let dirs = rep["result"]["directions"].as_array().unwrap();
    assert_eq!(dirs.len(), 2);
    for d in dirs {
        assert!(num(&d["derivative"]).abs() < 1e-12);
    }
}

#[test]
fn escape_and_fluctuating_cones_of_the_sticky_book() {
    let (code, rep, _) = run_on("escape", &fixture("sticky_book.json"), &[]);
    assert_eq!(code, 0);
    assert_eq!(rep["result"]["exact"], true);
    assert_eq!(rep["result"]["link_zeros"]["vertices"], serde_json::json!([]));
    let (code, rep, _) = run_on("fluct", &fixture("sticky_book.json"), &[]);
    assert_eq!(code, 0);
    let c = &rep["result"]["fluctuating"];
    assert_eq!(c["meets_link"], false);
    assert_eq!(rep["result"]["resolving_direction"]["point"], Value::Null);
}

#[test]
fn perturbation_moves_the_spider_mean_into_the_cone() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let mut cfg: Value = serde_json::from_slice(&std::fs::read(fixture("spider.json")).unwrap()).unwrap();
    cfg["perturb"] = serde_json::json!({ "epsilon": 0.01 });
    std::fs::write(&path, cfg.to_string()).unwrap();
    let (code, rep, _) = run_on("perturb", &path, &[]);
    assert_eq!(code, 0);
    let r = &rep["result"];
    assert!((num(&r["rate"]) - 1.0).abs() < 1e-9);
    assert_eq!(num(&r["angle_to_cone"]), 0.0);
}

#[test]
fn verify_exit_code_matches_the_failures() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let (code, rep, _) = run_on("verify", &fixture("sticky_book.json"), &["--csv", csv.to_str().unwrap()]);
    let r = &rep["result"];
    let fails = r["counts"]["fail"].as_u64().unwrap();
    assert_eq!(code == 0, fails == 0);
    assert_eq!(code, if fails == 0 { 0 } else { 2 });
    assert!(r["fixtures"].as_array().unwrap().contains(&Value::from("config")));
    let rows = std::fs::read_to_string(csv).unwrap().lines().count() - 1;
    assert_eq!(rows, r["outcomes"].as_array().unwrap().len());
}
