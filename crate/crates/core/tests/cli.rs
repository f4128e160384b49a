//! Black-box CLI tests: subcommand behaviour and exit codes
//! (0 success, 1 user error, 2 internal error).

use std::path::Path;
use std::process::{Command, Output};

fn blwbench(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blwbench"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn synth_writes_expected_sample_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = blwbench(
        &[
            "synth",
            "--hr",
            "120",
            "--fs",
            "360",
            "--duration",
            "300",
            "--out",
            "ecg.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("samples=108000"));
    let text = std::fs::read_to_string(dir.path().join("ecg.csv")).unwrap();
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 108_000);
}

#[test]
fn blw_generates_unit_sine() {
    let dir = tempfile::tempdir().unwrap();
    let out = blwbench(
        &[
            "blw",
            "--freq",
            "0.6",
            "--fs",
            "360",
            "--duration",
            "10",
            "--out",
            "blw.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("blw.csv")).unwrap();
    let vals: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect();
    // sin(2 pi 0.6 * 150/360) = 1
    assert!((vals[150] - 1.0).abs() < 1e-12);
}

#[test]
fn evaluate_prints_metric_triple() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ref.csv"), "1.0\n1.0\n1.0\n1.0\n").unwrap();
    std::fs::write(dir.path().join("test.csv"), "2.0\n2.0\n2.0\n2.0\n").unwrap();
    let out = blwbench(
        &[
            "evaluate", "--ref", "ref.csv", "--test", "test.csv", "--fs", "250",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("MAD=1.000000"), "{text}");
    assert!(text.contains("SSD=4.000000"), "{text}");
    assert!(text.contains("PRD=100.000000"), "{text}");
}

#[test]
fn unknown_method_is_a_user_error_listing_the_nine() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.csv"), "0.0\n1.0\n").unwrap();
    let out = blwbench(
        &[
            "denoise", "--method", "bogus", "--in", "in.csv", "--fs", "250", "--out", "o.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    for name in [
        "splines", "fir", "iir", "af", "maf", "ica", "issm", "emd", "wt",
    ] {
        assert!(err.contains(name), "missing {name} in {err}");
    }
}

#[test]
fn denoise_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = blwbench(
        &[
            "synth",
            "--hr",
            "120",
            "--fs",
            "360",
            "--duration",
            "20",
            "--out",
            "clean.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = blwbench(
        &[
            "blw",
            "--freq",
            "0.6",
            "--fs",
            "360",
            "--duration",
            "20",
            "--out",
            "noise.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = blwbench(
        &[
            "contaminate",
            "--clean",
            "clean.csv",
            "--noise",
            "noise.csv",
            "--fs",
            "360",
            "--target-mad",
            "0.5",
            "--out",
            "noisy.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let out = blwbench(
        &[
            "detect",
            "--in",
            "noisy.csv",
            "--fs",
            "360",
            "--out",
            "peaks.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let peaks = std::fs::read_to_string(dir.path().join("peaks.csv")).unwrap();
    let beats = peaks.lines().count();
    assert!((38..=42).contains(&beats), "{beats} beats detected");

    let out = blwbench(
        &[
            "denoise",
            "--method",
            "fir",
            "--cutoff",
            "0.67",
            "--in",
            "noisy.csv",
            "--fs",
            "360",
            "--ann",
            "peaks.csv",
            "--out",
            "cleaned.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));

    let out = blwbench(
        &[
            "evaluate",
            "--ref",
            "clean.csv",
            "--test",
            "cleaned.csv",
            "--fs",
            "360",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    let mad: f64 = text
        .split("MAD=")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(
        mad < 0.5,
        "FIR should reduce the 0.5 contamination, got {mad}"
    );
}

#[test]
fn bench_runs_a_small_spec_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{
        "name": "smoke",
        "seed": 42,
        "signals": [{"synthetic": {"hr": 120.0, "fs": 360.0, "duration_s": 12.0}}],
        "noise": {"sine": {"freq_hz": 0.6, "amplitude": 1.0}},
        "contamination": {"target_mad": 0.5},
        "methods": [{"name": "identity"}, {"name": "maf"}, {"name": "fir"}]
    }"#;
    std::fs::write(dir.path().join("spec.json"), spec).unwrap();
    let out = blwbench(
        &[
            "bench",
            "--spec",
            "spec.json",
            "--out",
            "results",
            "--plot-data",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("determinism_hash="), "{text}");
    let report = std::fs::read_to_string(dir.path().join("results/report.md")).unwrap();
    assert_eq!(report.lines().filter(|l| l.starts_with("| ")).count(), 4); // header + 3 methods
    assert!(dir.path().join("results/result.json").exists());
    assert!(dir.path().join("results/metrics.csv").exists());
    assert!(dir.path().join("results/plot_fir.csv").exists());

    // Identity measures the raw contamination.
    let json = std::fs::read_to_string(dir.path().join("results/result.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    let identity_mad = parsed["identity"]["mad"].as_f64().unwrap();
    assert!((identity_mad - 0.5).abs() <= 1e-9);
}

#[test]
fn missing_input_file_is_a_user_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = blwbench(
        &[
            "evaluate", "--ref", "nope.csv", "--test", "nope.csv", "--fs", "250",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = blwbench(&["denoise", "--method", "fir"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = blwbench(&["no-such-subcommand"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = blwbench(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    for sub in [
        "synth",
        "blw",
        "ingest",
        "contaminate",
        "detect",
        "denoise",
        "evaluate",
        "bench",
    ] {
        assert!(stdout(&out).contains(sub), "help missing {sub}");
    }
}

#[test]
fn wfdb_ingest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    // Two-channel format-16 record.
    std::fs::write(
        dir.path().join("rec.hea"),
        "rec 2 250 3\nrec.dat 16 100 0 ch0\nrec.dat 16 100 0 ch1\n",
    )
    .unwrap();
    let mut bytes = Vec::new();
    for v in [100i16, -100, 200, -200, 300, -300] {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(dir.path().join("rec.dat"), bytes).unwrap();
    let out = blwbench(
        &[
            "ingest",
            "--header",
            "rec.hea",
            "--channel",
            "1",
            "--out",
            "ch1.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("ch1.csv")).unwrap();
    let vals: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(vals, vec![-1.0, -2.0, -3.0]);
}
