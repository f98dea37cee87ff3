use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn siegel(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siegel"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const SMALL: &str = r#"{
  "seed": 5,
  "budgets": {
    "group_trials": 60, "ratio_samples_g2": 100, "ratio_samples_g3": 10,
    "height_pairs": 60, "survey_samples": 40, "comparison_samples": 200,
    "profile_rel_se": 0.01, "count_heights": [10, 20, 40], "cm_bound": 400
  }
}"#;

#[test]
fn reduce_and_act() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.json"), r#"{"g": 1, "X": ["0.6"], "Y": ["0.2"]}"#).unwrap();
    fs::write(dir.path().join("m.json"), r#"{"g": 1, "entries": ["1", "1", "0", "1"]}"#).unwrap();
    let out = siegel(&["reduce", "--point", "p.json", "--g", "1"], dir.path());
    assert!(out.status.success());
    let v = json(&out);
    let gamma: Vec<i64> = v["gamma"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e.as_str().unwrap().parse().unwrap())
        .collect();
    assert!(gamma == [2, -1, -1, 1] || gamma == [-2, 1, 1, -1], "{gamma:?}");
    let y: f64 = v["reduced_point"]["Y"][0].as_str().unwrap().parse().unwrap();
    assert!((y - 1.0).abs() < 1e-12);
    assert_eq!(v["report"]["in_domain"], true);

    let out = siegel(&["act", "--matrix", "m.json", "--point", "p.json"], dir.path());
    let x: f64 = json(&out)["X"][0].as_str().unwrap().parse().unwrap();
    assert!((x - 1.6).abs() < 1e-12);

    let bad = siegel(&["reduce", "--point", "p.json", "--g", "2"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    let missing = siegel(&["act", "--matrix", "nope.json", "--point", "p.json"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn volume_count_and_cm() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.json"),
        r#"{"g": 1, "entries": [[["0", "0"], ["1", "0"]]], "domain": {"re": ["-inf", "inf"], "im": ["0", "inf"]}}"#,
    )
    .unwrap();
    let v = json(&siegel(&["volume", "--chart", "c.json"], dir.path()));
    assert!((v["value"].as_f64().unwrap() - std::f64::consts::PI / 3.0).abs() < 1e-3);

    let out = siegel(&["--out", "o", "volume", "--chart", "c.json", "--boundary", "4,8,16", "--target", "0.01"], dir.path());
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("o/profile.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    let v = json(&siegel(&["count", "--g", "1", "--T", "1"], dir.path()));
    assert_eq!(v["rows"][0]["count"], 20);
    let v = json(&siegel(&["count", "--g", "1", "--series", "10,20,40"], dir.path()));
    assert!(v["fit"]["slope"].as_f64().unwrap() > 1.8);
    let box_chart = r#"{"g": 1, "entries": [[["0", "0"], ["1", "0"]]], "domain": {"re": ["0", "1"], "im": ["0", "1"]}}"#;
    fs::write(dir.path().join("box.json"), box_chart).unwrap();
    let v = json(&siegel(
        &["count", "--g", "1", "--T", "10", "--predicate", "translate-meets-domain", "--chart", "box.json"],
        dir.path(),
    ));
    assert_eq!(v["predicate"], "translate-meets-domain");
    let unknown = siegel(&["count", "--g", "1", "--T", "3", "--predicate", "nonsense"], dir.path());
    assert_eq!(unknown.status.code(), Some(2));

    let v = json(&siegel(&["cm-survey", "--bound", "23", "--records"], dir.path()));
    let last = v["records"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["d"], -23);
    assert_eq!(last["class_number"], 3);
}

#[test]
fn suite_and_export() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), SMALL).unwrap();
    let out = siegel(&["--config", "cfg.json", "--seed", "6", "--out", "r", "suite"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let board = json(&out);
    assert_eq!(board["seed"], 6);
    assert_eq!(board["rows"].as_array().unwrap().len(), 10);
    let saved = fs::read(dir.path().join("r/scoreboard.json")).unwrap();
    assert_eq!(saved, out.stdout);
    let csv = fs::read_to_string(dir.path().join("r/scoreboard.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);

    let again = siegel(&["--config", "cfg.json", "--seed", "6", "suite"], dir.path());
    assert_eq!(again.stdout, out.stdout);

    let md = siegel(&["export", "--board", "r/scoreboard.json", "--format", "markdown"], dir.path());
    let text = String::from_utf8(md.stdout).unwrap();
    assert!(text.contains("h(\\gamma_Z)\\prec h(Z)"));

    let failing = siegel(&["--config", "cfg.json", "suite", "--action-tol", "0"], dir.path());
    assert_eq!(failing.status.code(), Some(1));
    let board = json(&failing);
    assert_eq!(board["rows"][0]["status"], "fail");
}
