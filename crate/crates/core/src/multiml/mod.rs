//! The multinomial Mittag-Leffler function
//!
//! ```text
//! E_{rho',beta}(z_1..z_M) = sum_k sum_{k_1+..+k_M=k} (k; k_1..k_M)
//!     prod z_j^{k_j} / Gamma(beta + rho_1 k_1 + sum_{j>=2} (rho_1 - rho_j) k_j)
//! ```
//!
//! evaluated three ways: the power series itself ([`ml_series`]), a
//! Hankel-type contour integral ([`ml_contour`]) and the inverse-power
//! expansion in `z_1` ([`ml_asymptotic`]). [`ml_eval`] dispatches between
//! them and reports which regime produced the value.

mod asymptotic;
mod bound;
mod contour;
mod dispatch;
mod series;

pub use asymptotic::{asymptotic_coefficients, ml_asymptotic};
pub use bound::{ml_bound_check, BoundReport};
pub use contour::{ml_contour, ContourConfig, ContourSpec, RadiusRule, MAX_ARC_EXPONENT};
pub use dispatch::{ml_eval, ml_mode, series_peak_root, Evaluation, Regime, RegimePolicy};
pub use series::{ml_series, ml_series_with, SeriesConfig};


use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orders::FractionalOrders;

/// Second parameter `beta` and the argument tuple `(z_1, ..., z_M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlArguments {
    beta: f64,
    z: Vec<Complex64>,
}

impl MlArguments {
    pub fn new(beta: f64, z: Vec<Complex64>) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        if z.is_empty() {
            return Err(Error::InvalidArgument("empty argument tuple".into()));
        }
        if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite argument in {z:?}")));
        }
        Ok(Self { beta, z })
    }

    pub fn real(beta: f64, z: &[f64]) -> Result<Self> {
        Self::new(beta, z.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Arguments of the mode functions: `z_1 = -lambda t^{rho_1}`,
    /// `z_j = -q_j t^{rho_1 - rho_j}`.
    pub fn for_mode(orders: &FractionalOrders, beta: f64, lambda: f64, t: f64) -> Result<Self> {
        let mut z = Vec::with_capacity(orders.len());
        z.push(-lambda * t.powf(orders.leading()));
        z.extend(orders.secondary_args(t));
        Self::real(beta, &z)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn z1(&self) -> Complex64 {
        self.z[0]
    }

    pub fn with_z1(&self, z1: Complex64) -> Self {
        let mut out = self.clone();
        out.z[0] = z1;
        out
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self { beta, z: self.z.clone() }
    }

    pub fn is_real(&self) -> bool {
        self.z.iter().all(|v| v.im == 0.0)
    }

    /// `K = max_{j>=2} |z_j|`.
    pub fn secondary_bound(&self) -> f64 {
        self.z[1..].iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// The secondary arguments as reals when they are real and non-positive.
    pub(crate) fn secondary_nonpositive(&self) -> Option<Vec<f64>> {
        self.z[1..]
            .iter()
            .map(|v| (v.im == 0.0 && v.re <= 0.0).then_some(v.re))
            .collect()
    }

    pub(crate) fn check_len(&self, orders: &FractionalOrders) -> Result<()> {
        if self.z.len() != orders.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} arguments for {} orders",
                self.z.len(),
                orders.len()
            )));
        }
        Ok(())
    }
}

/// A function value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlValue {
    pub value: Complex64,
    pub est_error: f64,
}

/// `1 / Gamma(x)`, zero at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 171.0 {
        let (lg, sign) = libm::lgamma_r(x);
        return f64::from(sign) * (-lg).exp();
    }
    1.0 / libm::tgamma(x)
}
