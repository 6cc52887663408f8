use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubit-groupoid")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn axioms_pass() {
    let out = bin(&["axioms", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["data"]["violations"], 0);
}

#[test]
fn glimm_example() {
    let out = bin(&["glimm", "--n", "5", "--lambda", "0.3", "--trials", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["data"]["max_abs_deviation"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["data"]["seed"], 7);
}

#[test]
fn partition_example() {
    let out = bin(&["ising-partition", "--J", "1", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let d = &json(&out)["data"];
    assert!((d["brute_force"].as_f64().unwrap() - 6.1723).abs() < 1e-4);
    assert!((d["recursion"].as_f64().unwrap() - 6.1723).abs() < 1e-4);
    assert!((d["cosh_power"].as_f64().unwrap() - 9.5244).abs() < 1e-4);
    assert_eq!(d["cosh_power_mismatch"], true);
}

#[test]
fn byte_identical_reruns() {
    let args = ["algebra", "--n", "3", "--depth", "4", "--trials", "30", "--seed", "99"];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = bin(&["algebra", "--n", "3", "--depth", "4", "--trials", "30", "--seed", "100"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bin(&["axioms", "--n", "5", "--depth", "3"]).status.code(), Some(2));
    assert_eq!(bin(&["glimm", "--J", "1"]).status.code(), Some(2));
    assert_eq!(bin(&["spectrum", "--lambda", "0.5"]).status.code(), Some(2));
    assert_eq!(bin(&["trace", "--lambda", "1.5"]).status.code(), Some(2));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"measure": {"kind": "ising", "J": 0.5}, "n": 3, "trials": 5}"#).unwrap();
    let cfg = cfg.to_str().unwrap();

    let r = json(&bin(&["ising-partition", "--config", cfg]));
    assert_eq!(r["config"]["n"], 3);
    assert_eq!(r["data"]["J"], 0.5);

    let r = json(&bin(&["ising-partition", "--config", cfg, "--J", "2", "--n", "4"]));
    assert_eq!(r["data"]["J"], 2.0);
    assert_eq!(r["data"]["n"], 4);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"nn": 3}"#).unwrap();
    assert_eq!(bin(&["axioms", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = bin(&["spectrum", "--n", "6", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("command,check,value,relation,threshold,pass,witness\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn build_then_check_and_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let o = bin(&["dfs-build", "--n", "3", "--depth", "5", "--seed", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = bin(&["dfs-check", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let mut report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let v = &mut report["data"]["table"]["entries"][3]["values"][7];
    *v = Value::from(v.as_f64().unwrap() + 1.0);
    std::fs::write(&path, report.to_string()).unwrap();
    let o = bin(&["dfs-check", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["failure"]["invariant"], "dfs_condition");
    assert!(r["failure"]["witness"].is_string());
}

#[test]
fn trace_sweep_exit_rule() {
    let o = bin(&["trace", "--n", "3", "--depth", "4", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["data"]["sweep"].as_array().unwrap().len(), 4);
    let o = bin(&["trace", "--lambda", "0.3", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["checks"][0]["relation"], ">=");
}
