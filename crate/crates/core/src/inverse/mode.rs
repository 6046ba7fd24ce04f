use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, IncompatibleMode, Result};
use crate::fracode::{b_coefficient, mode_homogeneous, Settings, SourceTimeProfile};
use crate::orders::FractionalOrders;

/// The two scalars that couple a mode's data at time `t`:
/// `T(t) = phi * bracket + f * b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeFactors {
    pub lambda: f64,
    pub t: f64,
    pub b: f64,
    /// `1 - lambda t^{rho_1} E_{rho',rho_1+1}(..)`.
    pub bracket: f64,
}

impl ModeFactors {
    pub fn compute(
        orders: &FractionalOrders,
        lambda: f64,
        g: &SourceTimeProfile,
        t: f64,
        settings: &Settings,
    ) -> Result<Self> {
        if t == 0.0 {
            return Ok(Self { lambda, t, b: 0.0, bracket: 1.0 });
        }
        let bracket = mode_homogeneous(orders, lambda, t, settings)?;
        let b = b_coefficient(orders, lambda, g, t, settings)?;
        Ok(Self { lambda, t, b, bracket })
    }

    pub fn trace(&self, phi: Complex64, f: Complex64) -> Complex64 {
        phi * self.bracket + f * self.b
    }

    /// `Psi - phi * bracket`, the part of the data the source must explain.
    pub fn data_residual(&self, phi: Complex64, psi: Complex64) -> Complex64 {
        psi - phi * self.bracket
    }

    pub fn reconstruct(&self, phi: Complex64, psi: Complex64, threshold: f64) -> ModeOutcome {
        let residual = self.data_residual(phi, psi);
        if self.b.abs() < threshold {
            ModeOutcome::Degenerate(DegenerateMarker { b: self.b, phi, psi, residual })
        } else {
            ModeOutcome::Regular { f: residual / self.b, b: self.b }
        }
    }
}

/// Data of a mode whose denominator vanishes numerically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegenerateMarker {
    pub b: f64,
    pub phi: Complex64,
    pub psi: Complex64,
    pub residual: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ModeOutcome {
    Regular { f: Complex64, b: f64 },
    Degenerate(DegenerateMarker),
}

/// `f_n = (Psi_n - phi_n bracket) / b(t0)` unless `|b(t0)| < threshold`.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_mode(
    orders: &FractionalOrders,
    lambda: f64,
    phi: Complex64,
    psi: Complex64,
    g: &SourceTimeProfile,
    t0: f64,
    threshold: f64,
    settings: &Settings,
) -> Result<ModeOutcome> {
    if !(t0 > 0.0 && t0 <= g.horizon()) {
        return Err(Error::InvalidArgument(format!(
            "observation time {t0} must lie in (0, {}]",
            g.horizon()
        )));
    }
    Ok(ModeFactors::compute(orders, lambda, g, t0, settings)?.reconstruct(phi, psi, threshold))
}

/// Tolerance `rel * (|Psi| + |phi| + 1e-12)` on the residual of a degenerate
/// mode.
pub fn compatibility_tolerance(marker: &DegenerateMarker, rel: f64) -> f64 {
    rel * (marker.psi.norm() + marker.phi.norm() + 1e-12)
}

/// Returns the tolerance used when the residual passes.
pub fn check_compatibility(n: &[i64], marker: &DegenerateMarker, rel: f64) -> Result<f64> {
    let tolerance = compatibility_tolerance(marker, rel);
    let residual = marker.residual.norm();
    if residual <= tolerance {
        Ok(tolerance)
    } else {
        Err(Error::IncompatibleData { modes: vec![IncompatibleMode { n: n.to_vec(), residual, tolerance }] })
    }
}
