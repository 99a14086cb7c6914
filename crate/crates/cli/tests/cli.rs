// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use czsim_cli::config::schema_json;
use czsim_cli::output::sha256_hex;

fn czsim(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_czsim"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()
        .unwrap()
}

fn error_kind(o: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn checksums(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                sha256_hex(&fs::read(&p).unwrap()),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn gate_reports_a_good_slepian() {
    let dir = tempfile::tempdir().unwrap();
    let o = czsim(
        &["gate", "--shape", "slepian", "--length-ns", "45"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("gate_report.json")).unwrap())
            .unwrap();
    assert!(doc["data"]["report"]["fidelity"].as_f64().unwrap() >= 0.999);
    assert_eq!(doc["header"]["toolkit"], "czsim");
    assert_eq!(doc["header"]["command"], "gate");
}

#[test]
fn square_gate_is_worse_than_slepian() {
    let fid = |shape: &str, len: &str| {
        let dir = tempfile::tempdir().unwrap();
        let o = czsim(&["gate", "--shape", shape, "--length-ns", len], dir.path());
        assert!(o.status.success());
        let doc: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("gate_report.json")).unwrap())
                .unwrap();
        doc["data"]["report"]["fidelity"].as_f64().unwrap()
    };
    assert!(fid("square", "25") < fid("slepian", "45"));
}

#[test]
fn missing_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = czsim(&["gate", "--config", "/nonexistent/czsim.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "config_not_found");
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"seed": 1, "sede": 2}"#).unwrap();
    let o = czsim(&["gate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "config_invalid");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["sweep"][..],
        &["sweep", "--axis", ""],
        &["sweep", "--axis", "sideways"],
        &["xeb", "--qubits", "3"],
        &["gate", "--shape", "triangle"],
        &["frobnicate"],
    ] {
        let o = czsim(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(error_kind(&o), "usage", "{args:?}");
    }
}

#[test]
fn predistort_without_model_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let wf = dir.path().join("w.csv");
    fs::write(&wf, "t,v\n0,0\n0.1,1\n0.2,1\n").unwrap();
    let o = czsim(
        &["predistort", "--waveform", wf.to_str().unwrap()],
        &dir.path().join("out"),
    );
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "missing_distortion_model");
}

#[test]
fn predistort_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"distortion": {"gain": 1.0, "settling_terms": [{"amplitude": -0.05, "tau_ns": 50.0}]}}"#).unwrap();
    let wf = dir.path().join("w.csv");
    let body: String = (0..200)
        .map(|k| {
            format!(
                "{},{}\n",
                k as f64 * 0.1,
                if (20..150).contains(&k) { 5.8 } else { 6.2 }
            )
        })
        .collect();
    fs::write(&wf, body).unwrap();
    let out = dir.path().join("out");
    let o = czsim(
        &[
            "predistort",
            "--config",
            cfg.to_str().unwrap(),
            "--waveform",
            wf.to_str().unwrap(),
        ],
        &out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("predistort_report.json")).unwrap())
            .unwrap();
    assert!(doc["data"]["round_trip_relative_error"].as_f64().unwrap() < 1e-6);
}

#[test]
fn csv_files_carry_headers() {
    let dir = tempfile::tempdir().unwrap();
    let o = czsim(&["compensate", "--seed", "4"], dir.path());
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("fig3_compensation.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# toolkit: czsim "));
    assert!(lines[1].starts_with("# config_sha256: "));
    assert_eq!(lines[2], "# seed: 4");
    assert_eq!(lines[3], "# command: compensate");
    assert!(lines[4].starts_with("coupler_ghz,"));
    assert!(!text.contains('\r'));
}

#[test]
fn runs_are_reproducible_across_thread_counts() {
    for args in [
        &["xeb", "--qubits", "1"][..],
        &["waveforms"],
        &["sweep", "--axis", "coupling-detune"],
    ] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let one = [args, &["--threads", "1"][..]].concat();
        let two = [args, &["--threads", "2"][..]].concat();
        assert!(czsim(&one, a.path()).status.success());
        assert!(czsim(&two, b.path()).status.success());
        assert_eq!(checksums(a.path()), checksums(b.path()), "{args:?}");
    }
}

#[test]
fn seed_changes_benchmark_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(czsim(&["spb", "--qubits", "1", "--seed", "1"], a.path())
        .status
        .success());
    assert!(czsim(&["spb", "--qubits", "1", "--seed", "2"], b.path())
        .status
        .success());
    assert_ne!(checksums(a.path()), checksums(b.path()));
}

#[test]
fn bad_thread_env_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_czsim"))
        .args(["waveforms", "--output-dir"])
        .arg(dir.path())
        .env("CZSIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn published_schema_is_current() {
    let o = Command::new(env!("CARGO_BIN_EXE_czsim"))
        .arg("schema")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), schema_json());
    let doc = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/config.schema.json");
    assert_eq!(fs::read_to_string(doc).unwrap(), schema_json());
}
