use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn weakkam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakkam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn write_json(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn analyze_e2_prints_the_golden_report() {
    let out = weakkam(&["analyze", path_str(&data("e2.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let golden = fs::read(data("e2.report.json")).unwrap();
    assert_eq!(out.stdout, golden);
}

#[test]
fn analyze_writes_report_and_csv_files() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.json");
    let csv = dir.path().join("csv");
    let out = weakkam(&[
        "analyze",
        path_str(&data("e3.json")),
        "--emit",
        path_str(&report),
        "--csv",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read(&report).unwrap(), fs::read(data("e3.report.json")).unwrap());
    let beta = fs::read_to_string(csv.join("beta_by_level.csv")).unwrap();
    assert_eq!(beta, "level,beta\n0,0\n1,0\n2,0\n3,0\n4,0\n");
    let horizon = fs::read_to_string(csv.join("finite_horizon.csv")).unwrap();
    assert!(horizon.starts_with("k,sup_sk_over_k,beta\n1,0,0\n"));
    assert_eq!(horizon.lines().count(), 13);
}

#[test]
fn analyze_float_mode_agrees_on_e2() {
    let out = weakkam(&["analyze", path_str(&data("e2.json")), "--mode", "float"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = stdout_json(&out);
    assert_eq!(rep["mode"], "float");
    assert_eq!(rep["beta"], "5");
    assert_eq!(rep["verdict"], "PASS");
}

#[test]
fn plateau_window_flag_widens_the_scan() {
    let out = weakkam(&["analyze", path_str(&data("e3.json")), "--plateau-window", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = stdout_json(&out);
    assert_eq!(rep["truncation"]["window"], 5);
    assert_eq!(rep["truncation"]["beta_by_level"].as_array().unwrap().len(), 7);
}

#[test]
fn falsified_analysis_exits_three() {
    let dir = TempDir::new().unwrap();
    let mut cfg: Value = serde_json::from_str(&fs::read_to_string(data("e2.json")).unwrap()).unwrap();
    cfg["hoelder"] = json!({"h": "1", "lambda": "1/2"});
    let path = write_json(&dir, "tight.json", &cfg);
    let out = weakkam(&["analyze", path_str(&path)]);
    assert_eq!(out.status.code(), Some(3));
    let rep = stdout_json(&out);
    assert_eq!(rep["verdict"], "FALSIFIED");
    let failed: Vec<&str> = rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"hoelder.dominates"), "{failed:?}");
}

#[test]
fn malformed_config_exits_two_with_location() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"schema\": 1,\n  \"graph\": ").unwrap();
    let out = weakkam(&["analyze", path_str(&path)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("config::Parse"), "{err}");
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn unknown_fields_and_missing_files_exit_two() {
    let dir = TempDir::new().unwrap();
    let mut cfg: Value = serde_json::from_str(&fs::read_to_string(data("e2.json")).unwrap()).unwrap();
    cfg["colour"] = json!("blue");
    let path = write_json(&dir, "extra.json", &cfg);
    let out = weakkam(&["analyze", path_str(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let out = weakkam(&["analyze", path_str(&dir.path().join("absent.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn periodic_graph_is_rejected() {
    let out = weakkam(&["analyze", path_str(&data("periodic.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotFinitelyPrimitive"));
}

#[test]
fn verify_accepts_calibrated_and_rejects_too_small_beta() {
    let dir = TempDir::new().unwrap();
    let cfg = data("e2.json");
    let cases = [
        (json!({"beta": "5", "u": {"0": "-5", "1": "-8", "2": "0"}}), 0, "VALID"),
        (json!({"beta": "5", "u": {"0": "0", "1": "0", "2": "0"}}), 0, "VALID"),
        (json!({"beta": "4", "u": {"0": "0", "1": "0", "2": "0"}}), 1, "INVALID"),
    ];
    for (i, (sub, code, verdict)) in cases.iter().enumerate() {
        let path = write_json(&dir, &format!("u{i}.json"), sub);
        let out = weakkam(&["verify", path_str(&cfg), path_str(&path)]);
        assert_eq!(out.status.code(), Some(*code), "case {i}");
        assert_eq!(stdout_json(&out)["verdict"], *verdict, "case {i}");
    }
}

#[test]
fn verify_reaudits_a_saved_report() {
    let out = weakkam(&["verify", path_str(&data("e3.json")), path_str(&data("e3.report.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["level"], 1);
    assert!(v["audit"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_rejects_a_tampered_report() {
    let dir = TempDir::new().unwrap();
    let mut rep: Value = serde_json::from_str(&fs::read_to_string(data("e2.report.json")).unwrap()).unwrap();
    rep["beta"] = json!("6");
    let path = write_json(&dir, "tampered.json", &rep);
    let out = weakkam(&["verify", path_str(&data("e2.json")), path_str(&path)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_with_unreadable_subaction_exits_two() {
    let dir = TempDir::new().unwrap();
    let path = write_json(&dir, "u.json", &json!({"beta": "5", "u": {"0": "-5"}}));
    let out = weakkam(&["verify", path_str(&data("e2.json")), path_str(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no value for vertex"));
}

#[test]
fn oracle_agrees_on_config_and_random_seeds() {
    let out = weakkam(&["oracle", path_str(&data("e2.json")), "--seeds", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(" 0 mismatches"), "{text}");
    assert!(text.contains("seed 9"));
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = TempDir::new().unwrap();
    let table: Vec<Value> = (0..14).map(|i| json!({"word": [i], "value": format!("-{i}")})).collect();
    let cfg = json!({
        "schema": 1,
        "graph": {"symbols": 14, "transitions": "full"},
        "potential": {"range": 1, "table": table},
    });
    let path = write_json(&dir, "big.json", &cfg);
    let out = weakkam(&["oracle", path_str(&path)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TooLarge"));
}
