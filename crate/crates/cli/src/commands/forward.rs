use anyhow::Result;
use tfsource_core::inverse::forward_fields;
use tfsource_core::torus::SpectralField;

use crate::config::ProblemConfig;
use crate::io::{build_field, coefficients_csv, grid_csv, RunDir};

pub const PHI_SALT: u64 = 1;
pub const PSI_SALT: u64 = 2;
pub const F_SALT: u64 = 3;

pub struct ForwardOutput {
    pub phi: SpectralField,
    pub f: SpectralField,
    pub times: Vec<f64>,
    pub u: Vec<SpectralField>,
    /// `u(., t0)`.
    pub psi: SpectralField,
}

pub fn run_forward(cfg: &ProblemConfig) -> Result<ForwardOutput> {
    let phi = build_field(&cfg.data.phi, cfg, PHI_SALT)?;
    let f = build_field(&cfg.data.f, cfg, F_SALT)?;
    let g = cfg.profile()?;
    let mut all_times = cfg.times.clone();
    all_times.push(cfg.t0);
    let mut u = forward_fields(&cfg.orders, &cfg.symbol, &g, &phi, &f, &all_times, &cfg.settings())?;
    let psi = u.pop().expect("t0 was appended");
    all_times.pop();
    Ok(ForwardOutput { phi, f, times: all_times, u, psi })
}

pub fn write_forward(out: &ForwardOutput, cfg: &ProblemConfig, run: &mut RunDir) -> Result<()> {
    let points = cfg.grid_points();
    run.write("phi_coeffs.csv", &coefficients_csv(&out.phi)?)?;
    run.write("f_coeffs.csv", &coefficients_csv(&out.f)?)?;
    run.write("f_grid.csv", &grid_csv(&out.f, points)?)?;
    run.write("psi_coeffs.csv", &coefficients_csv(&out.psi)?)?;
    run.write("psi_grid.csv", &grid_csv(&out.psi, points)?)?;
    write_time_slices(&out.times, &out.u, points, run)
}

/// `u_<i>_coeffs.csv`, `u_<i>_grid.csv` and `u_norms.csv` with `t, |u|`.
pub fn write_time_slices(times: &[f64], u: &[SpectralField], points: usize, run: &mut RunDir) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "t", "l2_norm"])?;
    for (i, (t, field)) in times.iter().zip(u).enumerate() {
        run.write(&format!("u_{i}_coeffs.csv"), &coefficients_csv(field)?)?;
        run.write(&format!("u_{i}_grid.csv"), &grid_csv(field, points)?)?;
        w.write_record([i.to_string(), t.to_string(), field.l2_norm().to_string()])?;
    }
    run.write("u_norms.csv", &w.into_inner()?)
}
