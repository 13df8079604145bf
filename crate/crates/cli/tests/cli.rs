use std::f64::consts::TAU;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bkklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bkklab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_circle_passes() {
    let out = bkklab(&["verify", "--scenario", "circle-euclidean", "--samples", "20000", "--grid", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    let rec = &r["record"];
    assert_eq!(rec["pass"], true);
    assert!((rec["rhs"].as_f64().unwrap() - TAU).abs() < 1e-3);
    assert!((rec["lhs"]["estimate"].as_f64().unwrap() - TAU).abs() < 0.05 * TAU);
    assert_eq!(r["scenario"]["samples"], 20000);
    assert_eq!(r["scenario"]["mode"], "theorem-2");
    assert_eq!(r["scenario"]["symmetrize_resolution"][0], 2048);
}

#[test]
fn norm_commands() {
    let z = bkklab(&["zonoid-check", "--norm", "lp:1.5:3"]);
    assert_eq!(z.status.code(), Some(0));
    let z = json(&z);
    assert_eq!(z["is_zonoid"], false);
    assert!(z["min_density"].as_f64().unwrap() < 0.0);

    let s = json(&bkklab(&["symmetrize", "--norm", "linf:2"]));
    assert!((s["h_symm_e1"].as_f64().unwrap() - 1.5).abs() < 1e-3);
    assert!((s["h_symm_ones"].as_f64().unwrap() - 2.0).abs() < 1e-3);

    let c = bkklab(&["crofton-density", "--norm", "euclidean:3", "--format", "csv"]);
    let text = String::from_utf8(c.stdout).unwrap();
    assert!(text.starts_with("x1,x2,x3,value"));
    let v: f64 = text.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((v - 1.0 / std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn output_is_deterministic_across_worker_counts() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_bkklab"))
            .args(["average-solutions", "--scenario", "circle-smooth-linf", "--samples", "9000", "--seed", "5"])
            .env("BKKLAB_WORKERS", workers)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_dir_and_csv_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_string_lossy().into_owned();
    let out = bkklab(&["average-solutions", "--scenario", "circle-k2", "--samples", "5000", "--out-dir", &d, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("weight,count,uncertain"));
    assert_eq!(csv.lines().count(), 5001);
    let saved: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("circle-k2-average.json")).unwrap()).unwrap();
    assert_eq!(saved["estimate"]["samples"], 5000);
    assert!(dir.path().join("circle-k2-average.csv").exists());
}

#[test]
fn custom_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "half.toml",
        r#"
name = "half-k2"
samples = 20000
grid = 256
chart = { kind = "circle" }
region = [[0.0, 3.141592653589793]]
factors = [{ family = "trig", frequencies = [[2]], norm = "euclidean:2" }]
"#,
    );
    let out = bkklab(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((json(&out)["record"]["rhs"].as_f64().unwrap() - TAU).abs() < 1e-3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "name = \"x\"\nsamples = \"many\"\n");
    let out = bkklab(&["verify", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(bkklab(&["verify", "--scenario", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(bkklab(&["zonoid-check", "--norm", "lp:x:3"]).status.code(), Some(2));

    // A single sample has no spread, so the 3σ test cannot absorb the bias.
    assert_eq!(bkklab(&["verify", "--scenario", "circle-euclidean", "--samples", "1"]).status.code(), Some(1));

    let peaked = write(
        dir.path(),
        "peak.toml",
        r#"
name = "peaked"
chart = { kind = "box", dim = 1 }
factors = [{ family = "poly", degrees = [[0], [1], [40]], norm = "euclidean:3" }]
"#,
    );
    let out = bkklab(&["mixed-volume", "--config", &peaked, "--grid", "8"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["tolerance_met"], false);
}
