use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noisyreg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn analyze_majority_without_noise() {
    let r = json(&["analyze", "--fn", "maj:3", "--delta", "0.0"]);
    let infl = r["influences"].as_array().unwrap();
    assert_eq!(infl.len(), 3);
    for v in infl {
        assert!((f(v) - 0.5).abs() < 1e-15);
    }
    assert_eq!(r["stability"].as_array().unwrap().len(), 9);
}

#[test]
fn analyze_dictator_and_parity() {
    let r = json(&["analyze", "--fn", "dictator:1"]);
    assert_eq!(r["top_coefficients"][0]["set"], serde_json::json!([1]));
    assert_eq!(f(&r["top_coefficients"][0]["value"]), 1.0);

    let r = json(&["analyze", "--fn", "parity:1,2", "--delta", "0.5"]);
    for v in r["influences"].as_array().unwrap() {
        assert!((f(v) - 0.5).abs() < 1e-15);
    }
}

#[test]
fn decompose_examples() {
    let r = json(&[
        "decompose",
        "--fn",
        "dictator:1",
        "--eps",
        "0.5",
        "--delta",
        "0.5",
        "--gamma",
        "0.5",
    ]);
    assert_eq!(r["depth"], 1);
    assert_eq!(f(&r["bad_mass"]), 0.0);

    let r = json(&[
        "decompose",
        "--fn",
        "constant:4,1",
        "--eps",
        "0.5",
        "--delta",
        "0.5",
        "--gamma",
        "0.5",
    ]);
    assert_eq!(r["depth"], 0);

    let r = json(&[
        "decompose",
        "--hom",
        "--fn",
        "maj:3",
        "--eps",
        "0.4",
        "--delta",
        "0.1",
        "--gamma",
        "0.25",
    ]);
    assert_eq!(r["homogeneous"], true);
    assert!(!r["queried_vars"].as_array().unwrap().is_empty());
}

#[test]
fn budget_exceeded_exits_2_without_dot_file() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("tree.dot");
    let out = run(&[
        "decompose",
        "--hom",
        "--var-cap",
        "1",
        "--fn",
        "maj:5",
        "--eps",
        "0.1",
        "--delta",
        "0.1",
        "--gamma",
        "0.1",
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dot.exists());
    let partial: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(partial["status"], "budget_exceeded");
}

#[test]
fn dot_file_written_on_success() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("tree.dot");
    json(&[
        "decompose",
        "--fn",
        "parity:1,2",
        "--eps",
        "0.2",
        "--delta",
        "0.5",
        "--gamma",
        "0.1",
        "--dot",
        dot.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("label=\"x1\""));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn mist_examples() {
    let maj3 = json(&["mist", "--fn", "maj:3", "--rho", "0.5"]);
    assert!((f(&maj3["slack"]) - 0.018_229_166_666_666_7).abs() < 1e-9);

    let c = json(&["mist", "--fn", "constant:4,0.5", "--rho", "0.3"]);
    assert!(f(&c["slack"]) <= 0.0);

    let maj11 = json(&["mist", "--fn", "maj:11", "--rho", "0.5"]);
    assert!(f(&maj11["slack"]) < f(&maj3["slack"]));
}

#[test]
fn mist_pipeline() {
    let r = json(&[
        "mist",
        "--fn",
        "maj:9",
        "--rho",
        "0.5",
        "--eps",
        "0.1",
        "--delta",
        "0.3",
        "--gamma",
        "0.1",
        "--q-eps",
        "0.3",
        "--q-delta",
        "0.5",
    ]);
    assert!(f(&r["pipeline"]["certified_bound"]) >= f(&r["stab"]));
    assert!(r["params_used"].is_object());

    let r = json(&[
        "mist",
        "--fn",
        "parity:1,2/4",
        "--rho",
        "0.5",
        "--eps",
        "0.1",
        "--delta",
        "0.3",
        "--gamma",
        "0.1",
        "--q-eps",
        "0.1",
        "--q-delta",
        "0.5",
    ]);
    assert_eq!(r["pipeline"]["hypothesis"]["ok"], false);

    // Pipeline flags come as a complete set.
    assert_eq!(
        run(&["mist", "--fn", "maj:3", "--rho", "0.5", "--eps", "0.1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn generate_round_trips_through_file_spec() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tt");
    let out = run(&["generate", "--fn", "tribes:2,2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let spec = format!("file:{}", path.display());
    let a = json(&["analyze", "--fn", &spec]);
    let b = json(&["analyze", "--fn", "tribes:2,2"]);
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["analyze", "--fn", "maj:4"]).status.code(), Some(1));
    assert_eq!(run(&["analyze"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(
        run(&["analyze", "--fn", "file:/nonexistent/x.tt"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["analyze", "--fn", "maj:3", "--delta", "1.5"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["mist", "--fn", "maj:3", "--rho", "1.0"]).status.code(), Some(3));
    assert_eq!(
        run(&[
            "decompose",
            "--fn",
            "maj:3",
            "--eps",
            "0",
            "--delta",
            "0.5",
            "--gamma",
            "0.5"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(run(&["params", "--eps", "0.9"]).status.code(), Some(3));
}

#[test]
fn asymptotic_params_report() {
    let r = json(&["params", "--eps", "0.001"]);
    assert_eq!(r["q_eps_underflow"], true);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "decompose",
        "--fn",
        "random:10,42",
        "--eps",
        "0.1",
        "--delta",
        "0.3",
        "--gamma",
        "0.2",
        "--pretty",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
