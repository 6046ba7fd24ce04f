use serde::Serialize;

use super::assemble::{assemble, FreeCoefficientPolicy, InverseProblem, ReconstructionResult};
use crate::error::{Error, Result};
use crate::fracode::{b_coefficient, GProfile, Settings, SourceTimeProfile};
use crate::orders::FractionalOrders;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniquenessVerdict {
    /// No degenerate modes and the alternative policy reproduced `f` bit for bit.
    Unique,
    /// Two distinct sources both reproduce the data.
    NonUnique,
    /// Neither of the above could be demonstrated.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub verdict: UniquenessVerdict,
    pub degenerate_count: usize,
    pub bitwise_equal: bool,
    pub max_difference: f64,
    /// `(overdetermination, initial)` relative residuals of both solutions.
    pub residuals: [(f64, f64); 2],
    pub tolerances: ProbeTolerances,
}

/// Acceptance bounds on the relative residuals of a candidate solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeTolerances {
    pub overdetermination: f64,
    /// `u(., t) -> phi` is only approached at the rate `t^{rho_1}`.
    pub initial: f64,
}

impl Default for ProbeTolerances {
    fn default() -> Self {
        Self { overdetermination: 1e-9, initial: 1e-6 }
    }
}

/// Re-runs the reconstruction with `alternative` as the free-coefficient
/// policy and compares with `result`.
pub fn uniqueness_probe(
    problem: &InverseProblem,
    result: &ReconstructionResult,
    alternative: FreeCoefficientPolicy,
    tolerances: ProbeTolerances,
) -> Result<UniquenessReport> {
    let mut other_problem = problem.clone();
    other_problem.settings.free_coefficients = alternative;
    let other = assemble(&other_problem, &[])?;

    let bitwise_equal = result.f.coeffs().len() == other.f.coeffs().len()
        && result
            .f
            .coeffs()
            .iter()
            .zip(other.f.coeffs())
            .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    let max_difference =
        result.f.sub(&other.f)?.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);

    let phi_scale = problem.phi.l2_norm().max(f64::MIN_POSITIVE);
    let rel = |r: &ReconstructionResult| {
        let init = if problem.phi.l2_norm() > 0.0 { r.diagnostics.initial_residual / phi_scale } else { r.diagnostics.initial_residual };
        (r.diagnostics.overdetermination_relative, init)
    };
    let residuals = [rel(result), rel(&other)];
    let passing = residuals.iter().all(|&(a, b)| a < tolerances.overdetermination && b < tolerances.initial);
    let degenerate_count = result.degenerate_modes.len();

    let verdict = if degenerate_count == 0 && bitwise_equal {
        UniquenessVerdict::Unique
    } else if degenerate_count > 0 && !bitwise_equal && passing {
        UniquenessVerdict::NonUnique
    } else {
        UniquenessVerdict::Inconclusive
    };
    Ok(UniquenessReport { verdict, degenerate_count, bitwise_equal, max_difference, residuals, tolerances })
}

/// Frequency `omega` in `[lo, hi]` at which `g(t) = cos(omega t)` makes
/// `b(t0)` vanish for the eigenvalue `lambda`. `b` must change sign on the
/// bracket.
pub fn bisect_cosine_degeneracy(
    orders: &FractionalOrders,
    lambda: f64,
    t0: f64,
    horizon: f64,
    bracket: (f64, f64),
    settings: &Settings,
) -> Result<f64> {
    let b = |omega: f64| -> Result<f64> {
        let g = SourceTimeProfile::new(GProfile::Cosine { amplitude: 1.0, omega, phase: 0.0 }, horizon)?;
        b_coefficient(orders, lambda, &g, t0, settings)
    };
    let (mut lo, mut hi) = bracket;
    let (mut b_lo, b_hi) = (b(lo)?, b(hi)?);
    if b_lo == 0.0 {
        return Ok(lo);
    }
    if b_hi == 0.0 {
        return Ok(hi);
    }
    if b_lo.signum() == b_hi.signum() {
        return Err(Error::InvalidArgument(format!(
            "b does not change sign on [{lo}, {hi}] ({b_lo:e}, {b_hi:e})"
        )));
    }
    while hi - lo > 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let b_mid = b(mid)?;
        if b_mid == 0.0 {
            return Ok(mid);
        }
        if b_mid.signum() == b_lo.signum() {
            lo = mid;
            b_lo = b_mid;
        } else {
            hi = mid;
        }
    }
    Ok(if b_lo.abs() <= b(hi)?.abs() { lo } else { hi })
}
