use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn rp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rp"))
        .args(args)
        .env_remove("RP_THREADS")
        .output()
        .expect("rp runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn heisenberg_ricci_json() {
    let out = rp(&["ricci", &fixture("heisenberg.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "rp-report/1");
    let generic = &v["generic"];
    let ric = generic["ric"].as_array().unwrap();
    let diag: Vec<f64> = (0..3).map(|i| ric[i][i].as_f64().unwrap()).collect();
    for (got, want) in diag.iter().zip([-1.0, -1.0, 1.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!((generic["f"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!(v["cross_check_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn soliton_ricci_text_reports_remainder() {
    let out = rp(&[
        "ricci",
        &fixture("heisenberg-soliton.json"),
        "--form",
        "blocks",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("F = 4"));
    assert!(text.contains("G = "));
}

#[test]
fn flat_metric_exits_two() {
    let out = rp(&["ricci", &fixture("flat-abelian.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("flat metric: F undefined"));
}

#[test]
fn certify_exit_codes() {
    let ok = rp(&[
        "certify",
        &fixture("heisenberg-soliton.json"),
        "--format",
        "json",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["certificate"]["verdict"], "soliton");
    let bad = rp(&["certify", &fixture("heisenberg-perturbed.json")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("not a soliton"));
    for f in [
        "hyperbolic-plane.json",
        "diagonal-pair.json",
        "heisenberg.json",
    ] {
        assert_eq!(rp(&["certify", &fixture(f)]).status.code(), Some(0), "{f}");
    }
}

#[test]
fn malformed_input_names_the_field() {
    let out = rp(&["ricci", &fixture("malformed-antisymmetry.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.starts_with("error:"));
    assert!(err.contains("brackets[1]"));
}

#[test]
fn missing_file_and_bad_flags_exit_two() {
    assert_eq!(rp(&["ricci", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(rp(&["ricci"]).status.code(), Some(2));
    assert_eq!(rp(&["frobnicate"]).status.code(), Some(2));
    let inverted = rp(&["lemma", "--which", "fAn", "--a", "5:1", "--grid", "3"]);
    assert_eq!(inverted.status.code(), Some(2));
    assert!(stderr(&inverted).contains("min > max"));
}

#[test]
fn maximize_rejects_nilpotent_input_and_bad_threads() {
    assert_eq!(
        rp(&["maximize", &fixture("heisenberg.json")]).status.code(),
        Some(2)
    );
    let out = Command::new(env!("CARGO_BIN_EXE_rp"))
        .args([
            "maximize",
            &fixture("heisenberg-soliton.json"),
            "--trials",
            "10",
        ])
        .env("RP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("RP_THREADS"));
}

#[test]
fn maximize_report_shape() {
    let out = rp(&[
        "maximize",
        &fixture("diagonal-pair.json"),
        "--trials",
        "200",
        "--starts",
        "4",
        "--iters",
        "50",
        "--strategy",
        "hybrid",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "maximize");
    assert_eq!(v["kind"], "abelian-nilradical");
    assert_eq!(v["settings"]["trials"], 200);
    let report = &v["report"];
    assert!(report["best_f"].as_f64().unwrap() <= 4.0 + 1e-7);
    assert_eq!(report["alert"], false);
    assert_eq!(report["equality_cases"], report["equality_certified"]);
}

#[test]
fn lemma_sweeps_run() {
    let fan = rp(&["lemma", "--which", "fAn", "--grid", "5"]);
    assert_eq!(fan.status.code(), Some(0));
    let v = json(&fan);
    assert_eq!(v["violations"], 0);
    assert!(v["equality_points"].as_u64().unwrap() > 0);

    let fai = rp(&[
        "lemma",
        "--which",
        "fAi",
        "--r",
        "4",
        "--samples",
        "500",
        "--seed",
        "3",
    ]);
    assert_eq!(fai.status.code(), Some(0));
    let v = json(&fai);
    assert_eq!(v["points"], 500);
    assert_eq!(v["violations"], 0);
}
