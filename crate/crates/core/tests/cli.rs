//! End-to-end checks of the `lmhs` binary: flags, emit/parse round trips,
//! and equality of the serial and threaded strata paths.

use std::path::PathBuf;
use std::process::Command;

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_lmhs")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lmhs-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn usage_and_unknown_flags() {
    let out = Command::new(exe()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));

    let out = Command::new(exe())
        .args(["verify-lmhs", "--nonsense"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(exe()).arg("help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = Command::new(exe())
        .args(["weightfilt", "/definitely/not/a/file.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn human_flag_and_out_file() {
    let dir = scratch("human");
    let status = Command::new(exe())
        .args(["emit-fixtures", dir.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let report_path = dir.join("report.json");
    let out = Command::new(exe())
        .args([
            "verify-lmhs",
            dir.join("fixture_a.json").to_str().unwrap(),
            "--human",
            "--out",
            report_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report_path).unwrap()).unwrap();
    assert_eq!(report["ok"], serde_json::Value::Bool(true));
    assert!(report.get("timing_ms").is_none(), "timing only on request");

    // --timing adds the field without affecting the exit code
    let out = Command::new(exe())
        .args([
            "verify-lmhs",
            dir.join("fixture_a.json").to_str().unwrap(),
            "--timing",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["timing_ms"].is_u64());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn threaded_strata_matches_serial() {
    let dir = scratch("threads");
    Command::new(exe())
        .args(["emit-fixtures", dir.to_str().unwrap()])
        .status()
        .unwrap();
    let path = dir.join("fixture_b.json");
    let serial = Command::new(exe())
        .args(["strata", path.to_str().unwrap()])
        .env_remove("LMHS_THREADS")
        .output()
        .unwrap();
    let threaded = Command::new(exe())
        .args(["strata", path.to_str().unwrap()])
        .env("LMHS_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(threaded.status.code(), Some(0));
    assert_eq!(
        serial.stdout, threaded.stdout,
        "worker count must not change the report"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn split_reports_non_mhs_as_mathematical_failure() {
    let dir = scratch("split");
    Command::new(exe())
        .args(["emit-fixtures", dir.to_str().unwrap()])
        .status()
        .unwrap();
    // replace the filtration by a line inside the bottom weight step
    let text = std::fs::read_to_string(dir.join("fixture_a_prime.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["hodge"]["1"] = serde_json::json!([["0"], ["1"]]);
    let bad = dir.join("bad.json");
    std::fs::write(&bad, serde_json::to_vec_pretty(&v).unwrap()).unwrap();
    let out = Command::new(exe())
        .args(["split", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["ok"], serde_json::Value::Bool(false));
    assert!(report["result"]["not_mhs"].is_string());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn all_commands_run_on_their_fixtures() {
    let dir = scratch("matrix");
    Command::new(exe())
        .args(["emit-fixtures", dir.to_str().unwrap()])
        .status()
        .unwrap();
    let runs: &[(&str, &str, i32)] = &[
        ("weightfilt", "fixture_a.json", 0),
        ("split", "fixture_a.json", 0),
        ("sl2", "fixture_c.json", 0),
        ("verify-lmhs", "fixture_c.json", 0),
        ("finfty", "fixture_a.json", 0),
        ("strata", "fixture_b.json", 0),
        ("ext-torus", "fixture_d.json", 0),
        ("chern", "fixture_d.json", 0),
        ("automorphy", "fixture_d.json", 0),
        ("coeffs", "fixture_d.json", 0),
        ("orbit", "fixture_a_prime.json", 0),
    ];
    for (cmd, file, expect) in runs {
        let out = Command::new(exe())
            .args([*cmd, dir.join(file).to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(*expect),
            "{cmd} on {file}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    std::fs::remove_dir_all(&dir).ok();
}
