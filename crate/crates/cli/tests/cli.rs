//! End-to-end checks of the command-line surface.

use std::process::{Command, Output};

fn qbisect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbisect"))
        .args(args)
        .env("QBISECT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn run_default_scenario_passes() {
    let out = qbisect(&["run", "--seed", "1"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["schema"], "qbisect/report/v1");
    assert_eq!(report["passed"], true);
    let suites = report["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 7);
}

#[test]
fn run_reports_are_byte_identical_across_runs() {
    let a = qbisect(&["run", "--seed", "42", "--n", "2"]);
    let b = qbisect(&["run", "--seed", "42", "--n", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn usage_errors_exit_two() {
    // Unknown n is a scenario validation error.
    let out = qbisect(&["run", "--n", "12"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown config fields are named in the error.
    let dir = std::env::temp_dir().join("qbisect-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, r#"{"bogus_field": 3}"#).unwrap();
    let out = qbisect(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_field"));
}

#[test]
fn certify_check_round_trip_and_corruption() {
    let dir = std::env::temp_dir().join("qbisect-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cert_path = dir.join("cert.json");
    let out = qbisect(&["certify", "--seed", "5", "--out", cert_path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let check = qbisect(&["check", cert_path.to_str().unwrap()]);
    assert!(check.status.success());

    // Replays are byte-identical.
    let cert_path2 = dir.join("cert2.json");
    let out2 = qbisect(&["certify", "--seed", "5", "--out", cert_path2.to_str().unwrap()]);
    assert!(out2.status.success());
    assert_eq!(
        std::fs::read(&cert_path).unwrap(),
        std::fs::read(&cert_path2).unwrap()
    );

    // A single flipped digit is rejected.
    let text = std::fs::read_to_string(&cert_path).unwrap();
    let idx = text.find("\"p\"").unwrap();
    let digit_at = text[idx..].find(|c: char| c.is_ascii_digit()).unwrap() + idx;
    let mut bytes = text.into_bytes();
    bytes[digit_at] = if bytes[digit_at] == b'9' { b'7' } else { bytes[digit_at] + 1 };
    let corrupted = dir.join("corrupted.json");
    std::fs::write(&corrupted, bytes).unwrap();
    let check = qbisect(&["check", corrupted.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(1));

    // The float backend is refused.
    let out = qbisect(&["certify", "--backend", "float"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_emits_zero_residual_points() {
    let out = qbisect(&["sample", "--what", "spine", "--count", "8", "--seed", "3"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["what"], "spine");
    let points = doc["points"].as_array().unwrap();
    assert_eq!(points.len(), 8);
    for p in points {
        assert_eq!(p["residual"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn bisector_subcommand_standard_example() {
    let p1 = r#"[["1/2","0","0","0"],["0","0","0","0"]]"#;
    let p2 = r#"[["-1/2","0","0","0"],["0","0","0","0"]]"#;
    let out = qbisect(&["bisector", "--p1", p1, "--p2", p2, "--emit", "spine", "--count", "6"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["common_norm"], "-3/4");
    assert!(doc["cross_product"].as_str().unwrap().starts_with("-5/4"));
    for p in doc["points"].as_array().unwrap() {
        assert_eq!(p["residual"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn fan_subcommand_reports_blades() {
    let out = qbisect(&["fan", "--config", r#"{"n":2,"seed":1,"selectors":2,"trials":8}"#]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let blades = doc["blades"].as_array().unwrap();
    assert_eq!(blades.len(), 2);
    for blade in blades {
        assert_eq!(blade["samples"], blade["samples_inside"]);
    }
}

#[test]
fn demo_prints_the_standard_values() {
    let out = qbisect(&["demo"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("-3/4"));
    assert!(text.contains("-5/4"));
    assert!(text.contains("-51/64"));
}
