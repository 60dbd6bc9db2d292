use std::path::Path;
use std::process::{Command, Output};

fn asymlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asymlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn theorem1_writes_one_row_per_m() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t1.csv");
    let json = dir.path().join("t1.json");
    let out = asymlab(&[
        "run",
        "--experiment",
        "theorem1",
        "--m-max",
        "10",
        "--samples",
        "2000",
        "--out-csv",
        path_str(&csv),
        "--out-json",
        path_str(&json),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().nth(1).unwrap().starts_with("1,0,1/8,"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary["experiment"], "theorem1");
    assert_eq!(summary["verdict"], "PASS");
    assert_eq!(summary["seed"], 1);
}

#[test]
fn missing_plan_file_is_a_config_error() {
    let out = asymlab(&[
        "run",
        "--experiment",
        "theorem2",
        "--plan",
        "/definitely/not/here.json",
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));
}

#[test]
fn malformed_set_literal_is_a_config_error() {
    let out = asymlab(&["run", "--experiment", "theorem4", "--set", "{not json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn tight_tolerance_fails_but_still_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t3.csv");
    let json = dir.path().join("t3.json");
    let out = asymlab(&[
        "run",
        "--experiment",
        "theorem3",
        "--tolerance",
        "theorem3=1e-9",
        "--out-csv",
        path_str(&csv),
        "--out-json",
        path_str(&json),
    ]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(csv.exists() && json.exists());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary["verdict"], "FAIL");
    assert_eq!(summary["tolerance_overrides"][0], "theorem3=1e-9");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"experiment": "theorem1", "m_max": 3, "samples": 0, "out_csv": "a.csv"}"#,
    )
    .unwrap();
    let out = asymlab(&["run", "--config", path_str(&cfg), "--m-max", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn outputs_are_bit_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for i in 0..2 {
        let csv = dir.path().join(format!("r{i}.csv"));
        let json = dir.path().join(format!("r{i}.json"));
        let out = asymlab(&[
            "run",
            "--experiment",
            "theorem2",
            "--seed",
            "7",
            "--stages",
            "3..5",
            "--out-csv",
            path_str(&csv),
            "--out-json",
            path_str(&json),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        files.push((std::fs::read(&csv).unwrap(), std::fs::read(&json).unwrap()));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn theorem1_mc_is_bit_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for i in 0..2 {
        let json = dir.path().join(format!("m{i}.json"));
        let out = asymlab(&[
            "run",
            "--experiment",
            "theorem1",
            "--m-max",
            "4",
            "--out-json",
            path_str(&json),
        ]);
        assert_eq!(code(&out), 0);
        texts.push(std::fs::read(&json).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn describe_plan_classifies() {
    let dir = tempfile::tempdir().unwrap();
    let finite = dir.path().join("finite.json");
    std::fs::write(
        &finite,
        r#"{"h0": 1, "stages": [{"N": 1, "L": 1, "H": 0}]}"#,
    )
    .unwrap();
    let out = asymlab(&["describe-plan", path_str(&finite), "--stages", "5"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("finite, limit measure 5/2"), "{text}");
    for h in ["1", "6", "21", "66", "201"] {
        assert!(
            text.lines().any(|l| l.split_whitespace().nth(5) == Some(h)),
            "missing h_j={h}\n{text}"
        );
    }

    let auto = dir.path().join("auto.json");
    std::fs::write(
        &auto,
        r#"{"h0": 1, "stages": [{"N": 1, "L": 2, "H": "auto-height"}]}"#,
    )
    .unwrap();
    let out = asymlab(&["describe-plan", path_str(&auto), "--stages", "4"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("classification: infinite"));

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"h0": 1, "stages": []}"#).unwrap();
    assert_eq!(code(&asymlab(&["describe-plan", path_str(&empty)])), 2);
}
