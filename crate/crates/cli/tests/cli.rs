use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use tfsource_cli::checks::DegenerateCase;
use tfsource_cli::config::{DataSpec, FieldSpec};
use tfsource_cli::io::{coefficients_csv, read_coefficients};
use tfsource_cli::ProblemConfig;
use tfsource_core::fracode::Settings;
use tfsource_core::inverse::InverseSettings;

fn tfsource(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfsource")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, cfg: &ProblemConfig) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, cfg.to_canonical_json().unwrap()).unwrap();
    path
}

fn run_cmd(cmd: &str, config: &Path, out: &Path) -> Output {
    tfsource(&[cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn coefficients(path: &Path) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .flat_map(|l| l.split(',').rev().take(2).map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .collect()
}

fn zero_config() -> ProblemConfig {
    let mut cfg = ProblemConfig::example();
    cfg.cutoff = 6;
    cfg.data = DataSpec { phi: FieldSpec::Zero, psi: Some(FieldSpec::Zero), f: FieldSpec::Zero };
    cfg
}

#[test]
fn zero_inputs_invert_to_zero_with_exit_0() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "zero.json", &zero_config());
    let out = dir.path().join("inv");
    let o = run_cmd("invert", &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(coefficients(&out.join("f_coeffs.csv")).iter().all(|v| *v == 0.0));
    let diag: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["status"], "unique");
    assert!(out.join("manifest.json").exists());
}

#[test]
fn zero_forward_gives_zero_field_and_psi_matches_slice() {
    let dir = TempDir::new().unwrap();
    let mut cfg = zero_config();
    cfg.times = vec![0.0, 0.25, cfg.t0];
    let cfg_path = write_config(dir.path(), "zero.json", &cfg);
    let out = dir.path().join("fwd");
    assert_eq!(code(&run_cmd("forward", &cfg_path, &out)), 0);
    for i in 0..3 {
        assert!(coefficients(&out.join(format!("u_{i}_coeffs.csv"))).iter().all(|v| *v == 0.0));
    }

    let mut cfg = ProblemConfig::example();
    cfg.times = vec![0.1, cfg.t0];
    let cfg_path = write_config(dir.path(), "random.json", &cfg);
    let out = dir.path().join("fwd2");
    assert_eq!(code(&run_cmd("forward", &cfg_path, &out)), 0);
    assert_eq!(std::fs::read(out.join("u_1_coeffs.csv")).unwrap(), std::fs::read(out.join("psi_coeffs.csv")).unwrap());
    assert_eq!(std::fs::read(out.join("u_1_grid.csv")).unwrap(), std::fs::read(out.join("psi_grid.csv")).unwrap());
}

#[test]
fn forward_then_invert_recovers_source() {
    let dir = TempDir::new().unwrap();
    let cfg = ProblemConfig::example();
    let fwd = dir.path().join("fwd");
    assert_eq!(code(&run_cmd("forward", &write_config(dir.path(), "f.json", &cfg), &fwd)), 0);

    let mut inv_cfg = cfg.clone();
    inv_cfg.data = DataSpec {
        phi: FieldSpec::Coefficients { path: "fwd/phi_coeffs.csv".into() },
        psi: Some(FieldSpec::Coefficients { path: "fwd/psi_coeffs.csv".into() }),
        f: FieldSpec::Zero,
    };
    let inv = dir.path().join("inv");
    let o = run_cmd("invert", &write_config(dir.path(), "i.json", &inv_cfg), &inv);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let truth = read_coefficients(&fwd.join("f_coeffs.csv"), 1, cfg.cutoff).unwrap();
    let got = read_coefficients(&inv.join("f_coeffs.csv"), 1, cfg.cutoff).unwrap();
    assert!(got.sub(&truth).unwrap().l2_norm() < 1e-7 * truth.l2_norm());
}

fn degenerate_config(dir: &Path, shift: f64) -> PathBuf {
    let case = DegenerateCase::build(&Settings::default()).unwrap();
    let (compatible, incompatible) = case.data(11, shift, &InverseSettings::default()).unwrap();
    let problem = if shift == 0.0 { compatible } else { incompatible };
    std::fs::write(dir.join("phi.csv"), coefficients_csv(&problem.phi).unwrap()).unwrap();
    std::fs::write(dir.join("psi.csv"), coefficients_csv(&problem.psi).unwrap()).unwrap();
    let mut cfg = ProblemConfig::example();
    cfg.orders = case.orders.clone();
    cfg.g = case.g.profile().clone();
    cfg.t0 = case.t0;
    cfg.cutoff = case.cutoff;
    cfg.data = DataSpec {
        phi: FieldSpec::Coefficients { path: "phi.csv".into() },
        psi: Some(FieldSpec::Coefficients { path: "psi.csv".into() }),
        f: FieldSpec::Zero,
    };
    write_config(dir, "degenerate.json", &cfg)
}

#[test]
fn compatible_degenerate_data_exit_10() {
    let dir = TempDir::new().unwrap();
    let cfg = degenerate_config(dir.path(), 0.0);
    let out = dir.path().join("inv");
    let o = run_cmd("invert", &cfg, &out);
    assert_eq!(code(&o), 10, "{}", String::from_utf8_lossy(&o.stderr));
    let diag: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["status"], "non-unique");
    assert_eq!(diag["degenerate_modes"].as_array().unwrap().len(), 2);
}

#[test]
fn incompatible_degenerate_data_exit_20() {
    let dir = TempDir::new().unwrap();
    let cfg = degenerate_config(dir.path(), 1e-3);
    let out = dir.path().join("inv");
    let o = run_cmd("invert", &cfg, &out);
    assert_eq!(code(&o), 20, "{}", String::from_utf8_lossy(&o.stderr));
    let diag: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["incompatible_modes"][0]["n"], serde_json::json!([2]));
    assert!(!out.join("f_coeffs.csv").exists());
}

#[test]
fn unreadable_data_exit_30() {
    let dir = TempDir::new().unwrap();
    let mut cfg = ProblemConfig::example();
    cfg.data.psi = Some(FieldSpec::Coefficients { path: "missing.csv".into() });
    let out = dir.path().join("inv");
    let o = run_cmd("invert", &write_config(dir.path(), "c.json", &cfg), &out);
    assert_eq!(code(&o), 30);
    let diag: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["status"], "numerical-failure");

    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    let o = run_cmd("invert", &dir.path().join("bad.json"), &out);
    assert_eq!(code(&o), 30);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &ProblemConfig::example());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(code(&run_cmd("forward", &cfg, out)), 0);
    }
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 5);
    for name in names {
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn overrides_and_manifest() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &ProblemConfig::example());
    let out = dir.path().join("o");
    let o = tfsource(&[
        "forward", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(),
        "--cutoff", "3", "--t0", "0.25", "--seed", "9", "--threads", "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(out.join("f_coeffs.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 7);
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 9);
    assert_eq!(m["command"], "forward");
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert!(m["artifacts"]["psi_coeffs.csv"]["sha256"].is_string());
}

#[test]
fn verify_surfaces_contour_violation() {
    let dir = TempDir::new().unwrap();
    let mut cfg = ProblemConfig::example();
    cfg.contour.theta = Some(2.2);
    cfg.contour.mu = Some(2.0);
    let out = dir.path().join("v");
    let o = run_cmd("verify", &write_config(dir.path(), "c.json", &cfg), &out);
    assert_eq!(code(&o), 1);
    let report = std::fs::read_to_string(out.join("verify.json")).unwrap();
    assert!(report.contains("contour violates its admissibility conditions"), "{report}");
}

#[test]
fn ml_eval_writes_sweep_table() {
    let dir = TempDir::new().unwrap();
    let mut cfg = ProblemConfig::example();
    cfg.sweep.points = 7;
    let out = dir.path().join("m");
    let o = run_cmd("ml-eval", &write_config(dir.path(), "c.json", &cfg), &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out.join("ml_eval.csv")).unwrap();
    let mut lines = table.lines();
    assert!(lines.next().unwrap().starts_with("z1,regime,value_re,value_im,est_error,deviation,agrees"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 7);
    assert!(values.windows(2).all(|w| w[1].abs() < w[0].abs()));
}

#[test]
fn homogeneous_forward_norms_decrease() {
    let dir = TempDir::new().unwrap();
    let mut cfg = ProblemConfig::example();
    cfg.data.f = FieldSpec::Zero;
    cfg.times = vec![0.05, 0.1, 0.3, 0.6, 1.0];
    let out = dir.path().join("fwd");
    assert_eq!(code(&run_cmd("forward", &write_config(dir.path(), "c.json", &cfg), &out)), 0);
    let norms: Vec<f64> = std::fs::read_to_string(out.join("u_norms.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(norms.len(), 5);
    assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
}
