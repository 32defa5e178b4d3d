use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kgsim::norms::NormReport;

fn kgsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgsim"))
        .args(args)
        .env_remove("KGSIM_T_END")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Tiny grid, short run; enough samples in `[2, t_end]` for the fits.
const TINY: [&str; 12] = [
    "--set", "box_period_over_pi=4", "--set", "plane_points=16", "--set", "mode_cutoff=2", "--set", "diagnostics_every=1", "--t-end", "4", "--dt", "0.25",
];

fn simulate(dir: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<&str> = TINY.to_vec();
    args.extend_from_slice(extra);
    args.extend(["--output-dir", dir.to_str().unwrap(), "simulate"]);
    kgsim(&args)
}

#[test]
fn norm_report_matches_golden() {
    let o = kgsim(&["norm-report", fixture("reference_field.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let got = NormReport::from_json(&serde_json::from_slice(&o.stdout).unwrap()).unwrap();
    let want = NormReport::from_json(&serde_json::from_str(&std::fs::read_to_string(fixture("reference_report.json")).unwrap()).unwrap()).unwrap();
    for ((k, a), b) in got.keys().iter().zip(got.values()).zip(want.values()) {
        assert!((a - b).abs() <= 1e-10 * b.abs(), "{k}: {a} vs {b}");
    }
}

#[test]
fn zero_field_has_zero_norms() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("reference_field.json")).unwrap();
    let mut file = kgsim::fieldfile::FieldFile::parse(&text).unwrap();
    file.u.iter_mut().chain(file.udot.iter_mut()).for_each(|v| *v = 0.0);
    let input = dir.path().join("zero.json");
    std::fs::write(&input, file.to_json()).unwrap();
    let o = kgsim(&["norm-report", input.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = NormReport::from_json(&serde_json::from_slice(&o.stdout).unwrap()).unwrap();
    for (k, v) in r.keys().iter().zip(r.values()) {
        if k != "t" && k != "z_k" && k != "z_l" {
            assert_eq!(v, 0.0, "{k}");
        }
    }
}

#[test]
fn malformed_field_file_names_offset_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(&input, "{\"grid\": {\"box_period\": 6.0,, }").unwrap();
    let out = dir.path().join("report.json");
    let o = kgsim(&["norm-report", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte 28"), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn corrupted_kernel_bound_exits_nonzero() {
    let o = kgsim(&["kernel-verify", "--k", "2", "--n", "0", "--t", "1,10,100", "--corrupt-bound"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn kernel_verify_small_range_passes_with_frozen_columns() {
    let o = kgsim(&["kernel-verify", "--k", "0", "--n", "0..1", "--t", "1,10,100"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["k", "n", "t", "sup_abs", "bound", "ratio"]);
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 2 * 3 * 2);
    assert!(records.iter().all(|r| r[5].parse::<f64>().unwrap().is_finite()));
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(code(&kgsim(&["decay-scan"])), 2);
    assert_eq!(code(&kgsim(&["--set", "bogus=1", "simulate"])), 2);
    assert_eq!(code(&kgsim(&["--set", "plane_points=lots", "simulate"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_kgsim")).env("KGSIM_T_END", "1e6").arg("simulate").output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("t_end"));
}

#[test]
fn config_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# comment\nplane_points = 16\nnot a pair\n").unwrap();
    let o = kgsim(&["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn simulate_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = simulate(d.path(), &["--seed", "7", "--set", "initial_data=random-bumps"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["norms.csv", "summary.json", "config.txt"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    // CSV re-parses into the report schema
    let mut rows = csv::Reader::from_path(a.path().join("norms.csv")).unwrap();
    let header = rows.headers().unwrap().clone();
    for rec in rows.records() {
        let rec = rec.unwrap();
        let obj: serde_json::Map<String, serde_json::Value> =
            header.iter().zip(rec.iter()).map(|(k, v)| (k.to_string(), serde_json::json!(v.parse::<f64>().unwrap()))).collect();
        assert!(NormReport::from_json(&serde_json::Value::Object(obj)).unwrap().all_finite_nonnegative());
    }
}

#[test]
fn linear_run_flags_conservation() {
    let dir = tempfile::tempdir().unwrap();
    let o = simulate(dir.path(), &["--coeffs", "zero"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s: kgsim::harness::RunSummary = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(s.flags.profile_drift <= 1e-12, "{:e}", s.flags.profile_drift);
    assert!(s.flags.energy_drift <= 1e-12, "{:e}", s.flags.energy_drift);
    assert!(s.energy_growth.exponent.abs() <= 1e-12);
}

#[test]
fn blow_up_reports_last_good_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let o = simulate(dir.path(), &["--coeffs", "zero", "--set", "q.0.0=1e8", "--epsilon0", "1"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let snap = dir.path().join("last_good.json");
    assert!(String::from_utf8_lossy(&o.stderr).contains(snap.to_str().unwrap()));
    kgsim::fieldfile::FieldFile::parse(&std::fs::read_to_string(snap).unwrap()).unwrap();
}
