use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mode::{compatibility_tolerance, DegenerateMarker, ModeFactors, ModeOutcome};
use crate::error::{Error, IncompatibleMode, Result};
use crate::fracode::{Settings, SourceTimeProfile};
use crate::orders::FractionalOrders;
use crate::torus::{mode_list, EllipticSymbol, SpectralField, SpectralMode};

/// Choice of `f_n` on degenerate modes, where any value solves the problem.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FreeCoefficientPolicy {
    #[default]
    Zero,
    Constant { re: f64, #[serde(default)] im: f64 },
    /// Per-mode values; unlisted degenerate modes get zero.
    Modes { values: Vec<FreeValue> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeValue {
    pub n: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl FreeCoefficientPolicy {
    pub fn value(&self, n: &[i64]) -> Complex64 {
        match self {
            Self::Zero => Complex64::new(0.0, 0.0),
            Self::Constant { re, im } => Complex64::new(*re, *im),
            Self::Modes { values } => values
                .iter()
                .find(|v| v.n == n)
                .map_or(Complex64::new(0.0, 0.0), |v| Complex64::new(v.re, v.im)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessPolicy {
    Off,
    #[default]
    Warn,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InverseSettings {
    pub solver: Settings,
    /// Relative degeneracy threshold on `|b| lambda`.
    pub degeneracy_eps: f64,
    /// Absolute threshold on `|b| / (|g| t0^{rho_1})` for `lambda = 0`.
    pub zero_mode_eps: f64,
    pub compatibility_rel: f64,
    /// Sobolev exponent of the smoothness check; `None` uses `N/2 + 1/2`.
    pub tau: Option<f64>,
    pub smoothness: SmoothnessPolicy,
    pub free_coefficients: FreeCoefficientPolicy,
}

impl Default for InverseSettings {
    fn default() -> Self {
        Self {
            solver: Settings::default(),
            degeneracy_eps: 1e-8,
            zero_mode_eps: 1e-12,
            compatibility_rel: 1e-8,
            tau: None,
            smoothness: SmoothnessPolicy::Warn,
            free_coefficients: FreeCoefficientPolicy::Zero,
        }
    }
}

/// Everything needed to recover `f` from `u(., 0) = phi` and `u(., t0) = Psi`.
#[derive(Debug, Clone)]
pub struct InverseProblem {
    pub orders: FractionalOrders,
    pub symbol: EllipticSymbol,
    pub g: SourceTimeProfile,
    pub t0: f64,
    pub phi: SpectralField,
    pub psi: SpectralField,
    pub settings: InverseSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeStatus {
    Regular,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeClassification {
    pub n: Vec<i64>,
    pub lambda: f64,
    pub b_t0: f64,
    pub status: ModeStatus,
    /// Threshold on `|b_t0|` below which the mode counts as degenerate.
    pub threshold_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRecord {
    pub classification: ModeClassification,
    pub bracket: f64,
    pub f: Complex64,
    /// `1 / |b_t0|`, the factor by which data errors reach `f_n`.
    pub amplification: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SobolevCheck {
    pub tau: f64,
    pub exponent: f64,
    pub phi_norm: f64,
    pub psi_norm: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `|u(., t0) - Psi|` in coefficient `l2`.
    pub overdetermination_residual: f64,
    pub overdetermination_relative: f64,
    /// `|u(., t_init) - phi|` at `t_init = 1e-12 T`.
    pub initial_residual: f64,
    pub initial_time: f64,
    /// Median of `|b| lambda` over modes with `lambda > 0`.
    pub scale: f64,
    pub sobolev: SobolevCheck,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSlice {
    pub t: f64,
    pub field: SpectralField,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub f: SpectralField,
    pub u: Vec<TimeSlice>,
    pub modes: Vec<ModeRecord>,
    pub degenerate_modes: Vec<ModeClassification>,
    pub free_coefficients: Vec<(Vec<i64>, Complex64)>,
    pub diagnostics: Diagnostics,
}

impl ReconstructionResult {
    pub fn is_unique(&self) -> bool {
        self.degenerate_modes.is_empty()
    }
}

/// `ModeFactors` at time `t` for every distinct eigenvalue, keyed by its bits.
pub fn factor_table(
    orders: &FractionalOrders,
    modes: &[SpectralMode],
    g: &SourceTimeProfile,
    t: f64,
    settings: &Settings,
) -> Result<BTreeMap<u64, ModeFactors>> {
    let mut lambdas: Vec<f64> = modes.iter().map(|m| m.lambda).collect();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    let factors: Vec<ModeFactors> = lambdas
        .par_iter()
        .map(|&l| ModeFactors::compute(orders, l, g, t, settings))
        .collect::<Result<_>>()?;
    Ok(factors.into_iter().map(|f| (f.lambda.to_bits(), f)).collect())
}

fn field_from_modes(dim: usize, cutoff: usize, values: impl Iterator<Item = (Vec<i64>, Complex64)>) -> SpectralField {
    let mut field = SpectralField::zeros(dim, cutoff).expect("dimension already validated");
    for (n, v) in values {
        field.set(&n, v).expect("mode inside cutoff");
    }
    field
}

/// `u(., t)` for known `phi` and `f`, one field per time.
pub fn forward_fields(
    orders: &FractionalOrders,
    symbol: &EllipticSymbol,
    g: &SourceTimeProfile,
    phi: &SpectralField,
    f: &SpectralField,
    times: &[f64],
    settings: &Settings,
) -> Result<Vec<SpectralField>> {
    if phi.dim() != symbol.dim() || f.dim() != symbol.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fields of dimension {} and {} for a symbol on T^{}",
            phi.dim(),
            f.dim(),
            symbol.dim()
        )));
    }
    let cutoff = phi.cutoff().max(f.cutoff());
    let modes = mode_list(symbol, cutoff)?;
    times
        .iter()
        .map(|&t| {
            let table = factor_table(orders, &modes, g, t, settings)?;
            Ok(field_from_modes(
                symbol.dim(),
                cutoff,
                modes.iter().map(|m| (m.n.clone(), table[&m.lambda.to_bits()].trace(phi.get(&m.n), f.get(&m.n)))),
            ))
        })
        .collect()
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let k = xs.len() / 2;
    Some(if xs.len() % 2 == 1 { xs[k] } else { 0.5 * (xs[k - 1] + xs[k]) })
}

fn sobolev_check(p: &InverseProblem) -> SobolevCheck {
    let dim = p.symbol.dim() as f64;
    let tau = p.settings.tau.unwrap_or(dim / 2.0 + 0.5);
    let exponent = tau + p.symbol.order() as f64;
    let phi_norm = p.phi.sobolev_norm(exponent);
    let psi_norm = p.psi.sobolev_norm(exponent);
    SobolevCheck { tau, exponent, phi_norm, psi_norm, passed: tau > dim / 2.0 && phi_norm.is_finite() && psi_norm.is_finite() }
}

/// Reconstructs `f` mode by mode and evaluates `u` at `times`.
pub fn assemble(problem: &InverseProblem, times: &[f64]) -> Result<ReconstructionResult> {
    let p = problem;
    let dim = p.symbol.dim();
    if p.phi.dim() != dim || p.psi.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "data of dimension {} and {} for a symbol on T^{dim}",
            p.phi.dim(),
            p.psi.dim()
        )));
    }
    let horizon = p.g.horizon();
    if !(p.t0 > 0.0 && p.t0 <= horizon) {
        return Err(Error::InvalidArgument(format!("observation time {} must lie in (0, {horizon}]", p.t0)));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && **t <= horizon)) {
        return Err(Error::InvalidArgument(format!("output time {t} outside [0, {horizon}]")));
    }

    let mut warnings = Vec::new();
    let sobolev = sobolev_check(p);
    if !sobolev.passed {
        let msg = format!(
            "Sobolev check failed: tau = {} (need > {}), norms {} and {}",
            sobolev.tau,
            dim as f64 / 2.0,
            sobolev.phi_norm,
            sobolev.psi_norm
        );
        match p.settings.smoothness {
            SmoothnessPolicy::Error => return Err(Error::SmoothnessViolation(msg)),
            SmoothnessPolicy::Warn => warnings.push(msg),
            SmoothnessPolicy::Off => {}
        }
    }

    let cutoff = p.phi.cutoff().max(p.psi.cutoff());
    let modes = mode_list(&p.symbol, cutoff)?;
    let solver = &p.settings.solver;
    let at_t0 = factor_table(&p.orders, &modes, &p.g, p.t0, solver)?;
    let factors = |m: &SpectralMode| at_t0[&m.lambda.to_bits()];

    let scale = median(modes.iter().filter(|m| m.lambda > 0.0).map(|m| factors(m).b.abs() * m.lambda).collect())
        .unwrap_or(0.0);
    let zero_threshold = p.settings.zero_mode_eps * p.g.norm() * p.t0.powf(p.orders.leading());

    let mut records = Vec::with_capacity(modes.len());
    let mut degenerate = Vec::new();
    let mut free = Vec::new();
    let mut incompatible = Vec::new();
    for m in &modes {
        let fac = factors(m);
        let threshold =
            if m.lambda > 0.0 { p.settings.degeneracy_eps * scale / m.lambda } else { zero_threshold };
        let (phi, psi) = (p.phi.get(&m.n), p.psi.get(&m.n));
        let (status, f) = match fac.reconstruct(phi, psi, threshold) {
            ModeOutcome::Regular { f, .. } => (ModeStatus::Regular, f),
            ModeOutcome::Degenerate(marker) => {
                let f = resolve_degenerate(&m.n, &marker, p, &mut incompatible);
                free.push((m.n.clone(), f));
                (ModeStatus::Degenerate, f)
            }
        };
        let classification =
            ModeClassification { n: m.n.clone(), lambda: m.lambda, b_t0: fac.b, status, threshold_used: threshold };
        if status == ModeStatus::Degenerate {
            degenerate.push(classification.clone());
        }
        records.push(ModeRecord { classification, bracket: fac.bracket, f, amplification: 1.0 / fac.b.abs() });
    }
    if !incompatible.is_empty() {
        return Err(Error::IncompatibleData { modes: incompatible });
    }

    let f_field = field_from_modes(dim, cutoff, records.iter().map(|r| (r.classification.n.clone(), r.f)));

    let u_t0 = field_from_modes(dim, cutoff, modes.iter().zip(&records).map(|(m, r)| (m.n.clone(), factors(m).trace(p.phi.get(&m.n), r.f))));
    let overdetermination_residual = u_t0.sub(&p.psi)?.l2_norm();
    let psi_norm = p.psi.l2_norm();
    let overdetermination_relative =
        if psi_norm > 0.0 { overdetermination_residual / psi_norm } else { overdetermination_residual };

    let initial_time = 1e-12 * horizon;
    let u_init = forward_fields(&p.orders, &p.symbol, &p.g, &p.phi, &f_field, &[initial_time], solver)?.remove(0);
    let initial_residual = u_init.sub(&p.phi)?.l2_norm();

    let u = forward_fields(&p.orders, &p.symbol, &p.g, &p.phi, &f_field, times, solver)?
        .into_iter()
        .zip(times)
        .map(|(field, &t)| TimeSlice { t, field })
        .collect();

    Ok(ReconstructionResult {
        f: f_field,
        u,
        modes: records,
        degenerate_modes: degenerate,
        free_coefficients: free,
        diagnostics: Diagnostics {
            overdetermination_residual,
            overdetermination_relative,
            initial_residual,
            initial_time,
            scale,
            sobolev,
            warnings,
        },
    })
}

fn resolve_degenerate(
    n: &[i64],
    marker: &DegenerateMarker,
    p: &InverseProblem,
    incompatible: &mut Vec<IncompatibleMode>,
) -> Complex64 {
    let tolerance = compatibility_tolerance(marker, p.settings.compatibility_rel);
    let residual = marker.residual.norm();
    if residual <= tolerance {
        p.settings.free_coefficients.value(n)
    } else {
        incompatible.push(IncompatibleMode { n: n.to_vec(), residual, tolerance });
        Complex64::new(0.0, 0.0)
    }
}
