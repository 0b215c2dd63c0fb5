use std::fs;
use std::process::{Command, Output};

fn curvlab(args: &[&str], config: Option<&str>) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_curvlab"));
    cmd.args(args).arg("--out").arg(dir.path().join("out"));
    if let Some(text) = config {
        let p = dir.path().join("config.json");
        fs::write(&p, text).unwrap();
        cmd.arg("--config").arg(p);
    }
    (cmd.output().unwrap(), dir)
}

#[test]
fn empty_audit_list_succeeds_and_writes_result() {
    let (out, dir) = curvlab(&["audit"], Some(r#"{"resolutions": [32], "sphere_cells": 8}"#));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("out/result.json")).unwrap()).unwrap();
    assert_eq!(result["status"], "pass");
    assert!(result["audits"].as_object().unwrap().is_empty());
}

#[test]
fn malformed_config_exits_2() {
    let (out, _d) = curvlab(&["audit"], Some(r#"{"resolutions": [16"#));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
}

#[test]
fn unknown_field_exits_2() {
    let (out, _d) = curvlab(&["whitney"], Some(r#"{"region": {"shape": "disk", "center": [0, 0], "radiu": 1}}"#));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radiu"));
}

#[test]
fn unknown_subcommand_exits_2() {
    let (out, _d) = curvlab(&["bogus"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_audit_exits_1() {
    let config = r#"{"resolutions": [32], "sphere_cells": 8,
        "audits": [{"kind": "gauss_bonnet", "name": "torus_claim", "deltas": [0.4, 0.3], "euler_characteristic": 0}]}"#;
    let (out, dir) = curvlab(&["audit"], Some(config));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("torus_claim: fail"));
    assert!(dir.path().join("out/torus_claim.json").exists());
}

#[test]
fn whitney_defaults_pass() {
    let (out, dir) = curvlab(&["whitney"], Some(r#"{"k_max": 7}"#));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/result.json").exists());
}
