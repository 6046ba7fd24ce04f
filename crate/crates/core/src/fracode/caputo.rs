use serde::Serialize;

use super::mode::ModeSolution;
use super::profile::SourceTimeProfile;
use crate::error::{Error, Result};
use crate::multiml::rgamma;
use crate::orders::FractionalOrders;

/// L1 approximation of the Caputo derivative of order `rho` at every grid
/// point `t_n = n dt`, `n >= 1`, from samples `u_0, u_1, ...`.
pub fn l1_derivative(values: &[f64], dt: f64, rho: f64) -> Vec<f64> {
    let n = values.len();
    let weights: Vec<f64> = (0..n)
        .map(|k| ((k + 1) as f64).powf(1.0 - rho) - (k as f64).powf(1.0 - rho))
        .collect();
    let scale = dt.powf(-rho) * rgamma(2.0 - rho);
    let increments: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    (1..n)
        .map(|m| {
            let sum: f64 = (0..m).map(|k| weights[k] * increments[m - 1 - k]).sum();
            scale * sum
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub dt: f64,
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_abs: f64,
    /// Largest residual on `t >= tail_start`, away from the weak singularity
    /// of the trace at the origin.
    pub tail_max: f64,
    pub tail_start: f64,
}

/// `sum_j q_j D^{rho_j}_{L1} T + lambda T - f g` at `t_n = n dt`, `n >= 1`.
/// The trace must be sampled on `0, dt, 2 dt, ...`.
pub fn caputo_l1_residual(
    orders: &FractionalOrders,
    solution: &ModeSolution,
    g: &SourceTimeProfile,
    dt: f64,
    tail_start: f64,
) -> Result<ResidualReport> {
    if !(dt > 0.0) || solution.times.len() < 2 {
        return Err(Error::InvalidArgument("a uniform trace with at least two points is required".into()));
    }
    for (k, t) in solution.times.iter().enumerate() {
        if (t - k as f64 * dt).abs() > 1e-9 * dt * (k as f64 + 1.0) {
            return Err(Error::InvalidArgument(format!(
                "trace is not on the uniform grid with step {dt}: t_{k} = {t}"
            )));
        }
    }
    let mut residuals: Vec<f64> = solution.values[1..]
        .iter()
        .zip(&solution.times[1..])
        .map(|(v, t)| solution.lambda * v - solution.f * g.eval(*t))
        .collect();
    for (rho, q) in orders.rho().iter().zip(orders.q()) {
        for (r, d) in residuals.iter_mut().zip(l1_derivative(&solution.values, dt, *rho)) {
            *r += q * d;
        }
    }
    let times = solution.times[1..].to_vec();
    let max_abs = residuals.iter().fold(0.0, |a: f64, r| a.max(r.abs()));
    let tail_max = residuals
        .iter()
        .zip(&times)
        .filter(|(_, t)| **t >= tail_start)
        .fold(0.0, |a: f64, (r, _)| a.max(r.abs()));
    Ok(ResidualReport { dt, times, residuals, max_abs, tail_max, tail_start })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracode::GProfile;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..=n).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn l1_is_exact_for_linear_functions() {
        // D^rho t = t^{1-rho} / Gamma(2 - rho)
        let dt = 0.01;
        let t = grid(100, dt);
        let d = l1_derivative(&t, dt, 0.4);
        for (k, v) in d.iter().enumerate() {
            let tk = (k + 1) as f64 * dt;
            assert!((v - tk.powf(0.6) * rgamma(1.6)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_trace_residual() {
        let o = FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5]).unwrap();
        let g = SourceTimeProfile::new(GProfile::Constant { value: 2.0 }, 1.0).unwrap();
        let times = grid(10, 0.1);
        let sol = ModeSolution {
            lambda: 3.0,
            phi: 1.5,
            f: 0.25,
            values: vec![1.5; times.len()],
            b: vec![0.0; times.len()],
            times,
        };
        let r = caputo_l1_residual(&o, &sol, &g, 0.1, 0.0).unwrap();
        assert!(r.residuals.iter().all(|v| (v - 4.0).abs() < 1e-14));
        let zero = ModeSolution { lambda: 0.0, f: 0.0, ..sol };
        assert_eq!(caputo_l1_residual(&o, &zero, &g, 0.1, 0.0).unwrap().max_abs, 0.0);
    }

    #[test]
    fn rejects_nonuniform_trace() {
        let o = FractionalOrders::single(0.5).unwrap();
        let g = SourceTimeProfile::new(GProfile::Constant { value: 1.0 }, 1.0).unwrap();
        let sol = ModeSolution { lambda: 1.0, phi: 1.0, f: 0.0, times: vec![0.0, 0.1, 0.3], values: vec![1.0; 3], b: vec![0.0; 3] };
        assert!(caputo_l1_residual(&o, &sol, &g, 0.1, 0.0).is_err());
    }
}
