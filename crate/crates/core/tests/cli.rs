use std::process::{Command, Output};

use awgn_id::bounds::{id_second_order, plan_achievability};
use awgn_id::channel::ChannelSpec;
use awgn_id::resolvability::{frey_bound, FreyParams};
use serde_json::Value;

fn awgn_id(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awgn-id")).args(args).env_remove("AWGN_ID_SEED").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = awgn_id(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn bounds_example() {
    let doc = json(&["bounds", "--n", "100", "--snr-db", "0", "--eps", "0.01"]);
    assert_eq!(doc["command"], "bounds");
    assert_eq!(doc["seed"], 1);
    let row = &doc["results"]["rows"][0];
    let v = row["loglog_N"].as_f64().unwrap();
    assert!((v - 29.447).abs() < 5e-4, "{v}");
    let spec = ChannelSpec::new(100, 1.0).unwrap();
    assert_eq!(v, id_second_order(&spec, 0.01).unwrap().value);
}

#[test]
fn bounds_grid_has_one_row_per_point() {
    let doc = json(&["bounds", "--n", "10,100,1000", "--power", "0.5,2", "--eps", "0.1,0.2"]);
    assert_eq!(doc["results"]["rows"].as_array().unwrap().len(), 12);
}

#[test]
fn plan_matches_library() {
    let doc = json(&["plan", "--n", "100", "--eps", "0.1"]);
    let delta = doc["results"]["delta_bound"].as_f64().unwrap();
    assert!((delta - (2.0 / 100f64.log2() + 2.0 / 102.0)).abs() < 1e-12);
    let spec = ChannelSpec::new(100, 1.0).unwrap();
    let plan = plan_achievability(&spec, 0.1, 1.0).unwrap();
    assert_eq!(doc["results"]["feasible"], plan.feasible);
    assert_eq!(delta, plan.delta_bound);
}

#[test]
fn frey_matches_library() {
    let doc = json(&["frey", "--n", "100", "--mutual-info", "0.5", "--central-second", "0.7805", "--third-abs", "2", "--xi", "0.2"]);
    let fp = FreyParams { mutual_info: 0.5, central_second: 0.7805, third_abs: 2.0, xi: 0.2, c: 2.0, d: 0.5, n: 100 };
    let b = frey_bound(&fp).unwrap();
    assert_eq!(doc["results"]["bound"]["prob_bound"].as_f64().unwrap(), b.prob_bound);
    assert_eq!(doc["results"]["bound"]["rate"].as_f64().unwrap(), b.rate);
}

#[test]
fn manifest_echoed_on_stderr() {
    let out = awgn_id(&["plan", "--n", "50", "--eps", "0.2", "--seed", "9"]);
    let err = String::from_utf8(out.stderr).unwrap();
    let line = err.lines().find(|l| l.starts_with("manifest: ")).expect("no manifest line");
    let m: Value = serde_json::from_str(&line["manifest: ".len()..]).unwrap();
    assert_eq!(m["command"], "plan");
    assert_eq!(m["seed"], 9);
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_awgn-id"))
        .args(["plan", "--n", "50", "--eps", "0.2"])
        .env("AWGN_ID_SEED", "42")
        .output()
        .unwrap();
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["seed"], 42);
}

#[test]
fn exit_codes() {
    assert_eq!(awgn_id(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(awgn_id(&["plan", "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(awgn_id(&["--help"]).status.code(), Some(0));
    let bad = awgn_id(&["bounds", "--n", "100", "--eps", "1.5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
    assert_eq!(awgn_id(&["frey", "--n", "2", "--third-abs", "2", "--xi", "0.2"]).status.code(), Some(1));
}

#[test]
fn csv_and_out_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sandwich.csv");
    let out = dir.path().join("sandwich.json");
    let run = awgn_id(&["sandwich", "--n", "100,200", "--eps", "0.1", "--csv", csv.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    assert!(run.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n,achievability,approximation,converse,approximation_gap,converse_gap,feasible,error\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 3);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved["results"], json(&["sandwich", "--n", "100,200", "--eps", "0.1"])["results"]);
}

#[test]
fn simulate_resolvability_quantize_clt_run() {
    let doc = json(&["simulate-id", "--n", "30", "--messages", "3", "--codewords", "4", "--trials", "500"]);
    assert!(doc["results"]["profile"]["max_type1"]["value"].is_number());
    let doc = json(&["resolvability", "--n", "4", "--trials", "1000"]);
    assert_eq!(doc["results"]["rows"].as_array().unwrap().len(), 4);
    let doc = json(&["quantize", "--n", "3", "--trials", "1000"]);
    assert!(doc["results"].is_object());
    let doc = json(&["clt", "--n", "20", "--trials", "1000"]);
    assert!(doc["results"].is_object());
}
