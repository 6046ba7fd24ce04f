use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::SourceTimeProfile;
use crate::error::{Error, Result};
use crate::multiml::{ml_mode, RegimePolicy};
use crate::orders::FractionalOrders;
use crate::quadrature::{integrate_adaptive, AdaptiveSpec};

/// Numerical settings shared by the mode-level routines.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub regime: RegimePolicy,
    pub quadrature: AdaptiveSpec,
}

/// `1 - lambda t^{rho_1} E_{rho',rho_1+1}(-lambda t^{rho_1}, -q_j t^{rho_1-rho_j})`.
pub fn mode_homogeneous(orders: &FractionalOrders, lambda: f64, t: f64, settings: &Settings) -> Result<f64> {
    check_lambda(lambda)?;
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 || lambda == 0.0 {
        return Ok(1.0);
    }
    let r1 = orders.leading();
    let e = ml_mode(orders, r1 + 1.0, lambda, t, &settings.regime)?;
    Ok(1.0 - lambda * t.powf(r1) * e)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("eigenvalue must be non-negative, got {lambda}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BReport {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    /// Smallest `E_{rho',rho_1}` seen at the quadrature nodes.
    pub min_kernel: f64,
    /// The same quantity after integrating by parts.
    pub by_parts: f64,
}

/// `b(t0)` by adaptive quadrature in `u = xi^{rho_1}`, where the kernel
/// `xi^{rho_1-1} dxi` becomes `du / rho_1`. The secondary arguments still
/// carry powers `u^{(rho_1-rho_j)/rho_1}`, so the quadrature runs in
/// `w = (u / t0^{rho_1})^{1/GRADING}` to flatten them at the origin.
pub fn b_coefficient(
    orders: &FractionalOrders,
    lambda: f64,
    g: &SourceTimeProfile,
    t0: f64,
    settings: &Settings,
) -> Result<f64> {
    Ok(b_direct(orders, lambda, g, t0, settings)?.0.value)
}

const GRADING: i32 = 3;

struct Direct {
    value: f64,
    error: f64,
    evaluations: usize,
}

fn b_direct(
    orders: &FractionalOrders,
    lambda: f64,
    g: &SourceTimeProfile,
    t0: f64,
    settings: &Settings,
) -> Result<(Direct, f64)> {
    check_lambda(lambda)?;
    if !(t0 >= 0.0 && t0.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t0}")));
    }
    if t0 == 0.0 {
        return Ok((Direct { value: 0.0, error: 0.0, evaluations: 0 }, f64::INFINITY));
    }
    let r1 = orders.leading();
    let span = t0.powf(r1);
    let mut min_kernel = f64::INFINITY;
    let integral = integrate_adaptive(
        |w| {
            let u = span * w.powi(GRADING);
            let du = span * GRADING as f64 * w.powi(GRADING - 1);
            let xi = u.powf(1.0 / r1).min(t0);
            let e = ml_mode(orders, r1, lambda, xi, &settings.regime)?;
            min_kernel = min_kernel.min(e);
            Ok(g.eval(t0 - xi) * e * du / r1)
        },
        0.0,
        1.0,
        &settings.quadrature,
    )?;
    let direct = Direct { value: integral.value, error: integral.error, evaluations: integral.evaluations };
    Ok((direct, min_kernel))
}

/// `b(t0)` with diagnostics, including the integration-by-parts form
/// `g(0) t0^{rho_1} E_{rho',rho_1+1}(t0) + int_0^{t0} g'(t0 - xi) xi^{rho_1} E_{rho',rho_1+1}(xi) dxi`.
pub fn b_coefficient_report(
    orders: &FractionalOrders,
    lambda: f64,
    g: &SourceTimeProfile,
    t0: f64,
    settings: &Settings,
) -> Result<BReport> {
    let (direct, min_kernel) = b_direct(orders, lambda, g, t0, settings)?;
    let r1 = orders.leading();
    let primitive = |xi: f64| -> Result<f64> {
        if xi == 0.0 {
            return Ok(0.0);
        }
        Ok(xi.powf(r1) * ml_mode(orders, r1 + 1.0, lambda, xi, &settings.regime)?)
    };
    let boundary = g.eval(0.0) * primitive(t0)?;
    let tail = integrate_adaptive(
        |w| {
            let xi = t0 * w.powi(GRADING);
            let dxi = t0 * GRADING as f64 * w.powi(GRADING - 1);
            Ok(g.deriv(t0 - xi) * primitive(xi)? * dxi)
        },
        0.0,
        1.0,
        &settings.quadrature,
    )?;
    Ok(BReport {
        value: direct.value,
        error: direct.error,
        evaluations: direct.evaluations,
        min_kernel,
        by_parts: boundary + tail.value,
    })
}

/// A mode trace `T(t)` with its convolution term `b(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSolution {
    pub lambda: f64,
    pub phi: f64,
    pub f: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub b: Vec<f64>,
}

/// `T(t) = phi [1 - lambda t^{rho_1} E_{rho',rho_1+1}] + f b(t)`; `T(0) = phi`.
pub fn mode_value(
    orders: &FractionalOrders,
    lambda: f64,
    phi: f64,
    f: f64,
    g: &SourceTimeProfile,
    t: f64,
    settings: &Settings,
) -> Result<(f64, f64)> {
    if t == 0.0 {
        return Ok((phi, 0.0));
    }
    let homogeneous = if phi == 0.0 { 0.0 } else { phi * mode_homogeneous(orders, lambda, t, settings)? };
    let b = b_coefficient(orders, lambda, g, t, settings)?;
    Ok((homogeneous + f * b, b))
}

/// Evaluates the trace on `times` in parallel.
pub fn mode_solve(
    orders: &FractionalOrders,
    lambda: f64,
    phi: f64,
    f: f64,
    g: &SourceTimeProfile,
    times: &[f64],
    settings: &Settings,
) -> Result<ModeSolution> {
    let pairs: Vec<(f64, f64)> = times
        .par_iter()
        .map(|&t| mode_value(orders, lambda, phi, f, g, t, settings))
        .collect::<Result<_>>()?;
    let (values, b) = pairs.into_iter().unzip();
    Ok(ModeSolution { lambda, phi, f, times: times.to_vec(), values, b })
}
