use anyhow::{Context, Result};
use serde::Serialize;
use tfsource_core::inverse::{
    assemble, InverseProblem, ModeClassification, ReconstructionResult, SobolevCheck,
};
use tfsource_core::{Complex64, Error};

use super::forward::{write_time_slices, PHI_SALT, PSI_SALT};
use crate::config::{FieldSpec, ProblemConfig};
use crate::io::{build_field, coefficients_csv, grid_csv, RunDir};

pub const EXIT_UNIQUE: i32 = 0;
pub const EXIT_NON_UNIQUE: i32 = 10;
pub const EXIT_INCOMPATIBLE: i32 = 20;
pub const EXIT_NUMERICAL: i32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvertStatus {
    Unique,
    NonUnique,
    Incompatible,
    NumericalFailure,
}

impl InvertStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Unique => EXIT_UNIQUE,
            Self::NonUnique => EXIT_NON_UNIQUE,
            Self::Incompatible => EXIT_INCOMPATIBLE,
            Self::NumericalFailure => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Amplification {
    pub n: Vec<i64>,
    pub lambda: f64,
    pub b_t0: f64,
    pub factor: f64,
}

#[derive(Debug, Serialize)]
pub struct IncompatibleReport {
    pub n: Vec<i64>,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Serialize)]
pub struct InvertDiagnostics {
    pub status: InvertStatus,
    pub exit_code: i32,
    pub message: Option<String>,
    pub overdetermination_residual: Option<f64>,
    pub overdetermination_relative: Option<f64>,
    pub initial_residual: Option<f64>,
    pub initial_relative: Option<f64>,
    pub scale: Option<f64>,
    pub sobolev: Option<SobolevCheck>,
    pub degenerate_modes: Vec<ModeClassification>,
    pub free_coefficients: Vec<(Vec<i64>, Complex64)>,
    pub incompatible_modes: Vec<IncompatibleReport>,
    pub amplification: Vec<Amplification>,
    pub warnings: Vec<String>,
}

impl InvertDiagnostics {
    fn empty(status: InvertStatus, message: Option<String>) -> Self {
        Self {
            status,
            exit_code: status.exit_code(),
            message,
            overdetermination_residual: None,
            overdetermination_relative: None,
            initial_residual: None,
            initial_relative: None,
            scale: None,
            sobolev: None,
            degenerate_modes: Vec::new(),
            free_coefficients: Vec::new(),
            incompatible_modes: Vec::new(),
            amplification: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

pub fn build_problem(cfg: &ProblemConfig) -> Result<InverseProblem> {
    let phi = build_field(&cfg.data.phi, cfg, PHI_SALT).context("building phi")?;
    let psi_spec = cfg.data.psi.clone().unwrap_or(FieldSpec::Zero);
    let psi = build_field(&psi_spec, cfg, PSI_SALT).context("building psi")?;
    Ok(InverseProblem {
        orders: cfg.orders.clone(),
        symbol: cfg.symbol.clone(),
        g: cfg.profile()?,
        t0: cfg.t0,
        phi,
        psi,
        settings: cfg.inverse_settings(),
    })
}

/// Classifies a finished reconstruction against the configured residual bounds.
pub fn classify(cfg: &ProblemConfig, problem: &InverseProblem, r: &ReconstructionResult) -> (InvertStatus, f64) {
    let d = &r.diagnostics;
    let phi_norm = problem.phi.l2_norm();
    let initial_relative = if phi_norm > 0.0 { d.initial_residual / phi_norm } else { d.initial_residual };
    let ok = d.overdetermination_relative <= cfg.tolerances.overdetermination
        && initial_relative <= cfg.tolerances.initial;
    let status = if !ok {
        InvertStatus::NumericalFailure
    } else if r.is_unique() {
        InvertStatus::Unique
    } else {
        InvertStatus::NonUnique
    };
    (status, initial_relative)
}

pub fn run_invert(cfg: &ProblemConfig, run: &mut RunDir) -> Result<InvertStatus> {
    let problem = match build_problem(cfg) {
        Ok(p) => p,
        Err(e) => return report_failure(run, InvertStatus::NumericalFailure, format!("{e:#}")),
    };
    let result = match assemble(&problem, &cfg.times) {
        Ok(r) => r,
        Err(Error::IncompatibleData { modes }) => {
            let mut diag = InvertDiagnostics::empty(
                InvertStatus::Incompatible,
                Some(format!("{} degenerate mode(s) violate the compatibility condition", modes.len())),
            );
            diag.incompatible_modes = modes
                .into_iter()
                .map(|m| IncompatibleReport { n: m.n, residual: m.residual, tolerance: m.tolerance })
                .collect();
            run.write_json("diagnostics.json", &diag)?;
            return Ok(InvertStatus::Incompatible);
        }
        Err(e) => return report_failure(run, InvertStatus::NumericalFailure, e.to_string()),
    };

    let (status, initial_relative) = classify(cfg, &problem, &result);
    let d = &result.diagnostics;
    let mut diag = InvertDiagnostics::empty(status, None);
    diag.overdetermination_residual = Some(d.overdetermination_residual);
    diag.overdetermination_relative = Some(d.overdetermination_relative);
    diag.initial_residual = Some(d.initial_residual);
    diag.initial_relative = Some(initial_relative);
    diag.scale = Some(d.scale);
    diag.sobolev = Some(d.sobolev.clone());
    diag.degenerate_modes = result.degenerate_modes.clone();
    diag.free_coefficients = result.free_coefficients.clone();
    diag.warnings = d.warnings.clone();
    diag.amplification = result
        .modes
        .iter()
        .map(|m| Amplification {
            n: m.classification.n.clone(),
            lambda: m.classification.lambda,
            b_t0: m.classification.b_t0,
            factor: m.amplification,
        })
        .collect();
    if status == InvertStatus::NumericalFailure {
        diag.message = Some("residuals exceed the configured tolerances".into());
    }

    let points = cfg.grid_points();
    run.write("f_coeffs.csv", &coefficients_csv(&result.f)?)?;
    run.write("f_grid.csv", &grid_csv(&result.f, points)?)?;
    let times: Vec<f64> = result.u.iter().map(|s| s.t).collect();
    let fields: Vec<_> = result.u.iter().map(|s| s.field.clone()).collect();
    write_time_slices(&times, &fields, points, run)?;
    run.write_json("diagnostics.json", &diag)?;
    Ok(status)
}

fn report_failure(run: &mut RunDir, status: InvertStatus, message: String) -> Result<InvertStatus> {
    run.write_json("diagnostics.json", &InvertDiagnostics::empty(status, Some(message)))?;
    Ok(status)
}
