use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torus-vacant")).args(args).output().unwrap()
}

#[test]
fn survival_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"N": 8, "u": [0.5], "replicas": 3}"#).unwrap();
    let out = dir.path().join("out");
    let o = run(&["survival", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout, fs::read_to_string(out.join("survival.csv")).unwrap());
    assert!(out.join("survival.ndjson").exists());
    assert!(out.join("survival.meta.json").exists());
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"N": 8, "unknown_field": 1}"#).unwrap();
    let o = run(&["survival", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["survival", "--config", "/nonexistent/c.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_grid_magic_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("g.bin");
    fs::write(&grid, b"NOTAGRID\x01\x00\x00").unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, serde_json::json!({ "grid": grid, "cases": 2 }).to_string()).unwrap();
    let o = run(&["validate", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn schema_prints_json() {
    let o = run(&["schema", "scan-u"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["properties"]["beta"].is_object());
    assert_eq!(run(&["schema", "nope"]).status.code(), Some(2));
}
