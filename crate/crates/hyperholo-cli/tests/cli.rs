use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperholo"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn verify_flat1_passes() {
    let out = run(&[
        "verify", "--model", "flat1", "--points", "64", "--seed", "42", "--tol", "1e-7",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("overall: PASS"), "{text}");
    assert!(text.contains("phi-moment"));
}

#[test]
fn seeded_reports_are_byte_identical() {
    let args = ["all", "--format", "json", "--seed", "7", "--points", "16"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn single_example_json_report() {
    let out = run(&["cocycle", "--example", "taub-nut", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["id"], "taub-nut");
    assert_eq!(checks[0]["max_defect"], 0.0);
    assert_eq!(checks[0]["pass"], true);
    assert_eq!(v["pass"], true);
    assert_eq!(v["command"], "cocycle");
}

#[test]
fn unknown_model_exits_2_with_choices() {
    let out = run(&["verify", "--model", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("nosuch"), "{err}");
    assert!(err.contains("flat1") && err.contains("semiflat1"), "{err}");
}

#[test]
fn unknown_example_exits_2_with_choices() {
    let out = run(&["contact", "--example", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("eh-constraint") && err.contains("iYA"),
        "{err}"
    );
}

#[test]
fn all_covers_every_registered_id() {
    let out = run(&["all", "--format", "json", "--points", "8", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let got: Vec<String> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(got, hyperholo_cli::registered_ids());
    assert_eq!(v["pass"], true);
}

#[test]
fn impossible_tolerance_exits_1() {
    let out = run(&[
        "verify", "--model", "flat1", "--points", "4", "--tol", "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("overall: FAIL"), "{text}");
}

#[test]
fn report_file_is_written() {
    let path = std::env::temp_dir().join(format!("hyperholo-report-{}.json", std::process::id()));
    let out = run(&[
        "special",
        "--format",
        "json",
        "--points",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["command"], "special");
    std::fs::remove_file(&path).ok();
}
