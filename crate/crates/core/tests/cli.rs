use std::process::{Command, Output};

use serde_json::Value;

fn ptbubble(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptbubble")).args(args).output().unwrap()
}

#[test]
fn cyclic_final_row_is_balanced() {
    let out = ptbubble(&["cyclic", "--gamma", "0.2", "--tf", "15", "--theta", "1.0471975512", "--phi", "0.5235987756"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(last.len(), 13);
    assert_eq!(last[0], 30.0);
    let (c1, c2) = (last[10].sqrt(), last[11].sqrt());
    assert!((c1 - c2).abs() / c1.max(c2) < 0.05);
}

#[test]
fn spectrum_real_outside_bubble_complex_inside() {
    let out = ptbubble(&["spectrum", "--no-meta", "--gamma", "0.2", "--eta-min", "-1", "--eta-max", "1", "--steps", "801"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eta,re_e1,im_e1,re_e2,im_e2"));
    let mut n = 0;
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|f| f.parse().unwrap()).collect();
        if v[0].abs() > 0.2 + 1e-9 {
            assert!(v[2].abs() < 1e-12 && v[4].abs() < 1e-12);
        } else if v[0].abs() < 0.2 - 1e-9 {
            assert!((v[2] + v[4]).abs() < 1e-12 && v[2].abs() > 0.0);
            assert!(v[1].abs() < 1e-12);
        }
        n += 1;
    }
    assert_eq!(n, 801);
}

#[test]
fn ratio_subcommand() {
    let out = ptbubble(&["ratio", "--gamma", "0.2", "--delta-y", "0.15"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["amplitude_ratio"].as_f64().unwrap() - 0.37796).abs() < 1e-5);
    let out = ptbubble(&["ratio", "--gamma", "0.2", "--delta-x", "0.15", "--alpha", "0.0666666666666667"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["amplitude_ratio"].is_null());
    assert_eq!(v["regime"], "no-equal-distribution");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"gamma": 0.1, "delta_y": 0.15}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let v: Value = serde_json::from_slice(&ptbubble(&["ratio", "--config", cfg]).stdout).unwrap();
    assert!(v["amplitude_ratio"].is_null());
    let v: Value = serde_json::from_slice(&ptbubble(&["ratio", "--config", cfg, "--gamma", "0.2"]).stdout).unwrap();
    assert!((v["amplitude_ratio"].as_f64().unwrap() - 0.37796).abs() < 1e-5);

    std::fs::write(dir.path().join("bad.json"), r#"{"nope": 1}"#).unwrap();
    let out = ptbubble(&["ratio", "--config", dir.path().join("bad.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_ptbubble"))
        .env("PTBUBBLE_THREADS", "2")
        .args(["scan-theta", "--steps", "3", "--no-meta", "-o", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 4);

    let bad = Command::new(env!("CARGO_BIN_EXE_ptbubble"))
        .env("PTBUBBLE_THREADS", "zero")
        .args(["ratio"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(ptbubble(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ptbubble(&["ratio", "--alpha", "0"]).status.code(), Some(1));
    assert_eq!(ptbubble(&["verify"]).status.code(), Some(0));
    assert_eq!(ptbubble(&["--help"]).status.code(), Some(0));
}
