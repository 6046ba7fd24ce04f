use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::dispatch::{ml_eval, RegimePolicy};
use super::MlArguments;
use crate::error::Result;
use crate::orders::FractionalOrders;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub abs_value: f64,
    /// `C / (1 + |z_1|)` at the requested argument.
    pub bound: f64,
    /// Fitted `C = max (1 + |z_1|) |E|` over the sample ray.
    pub constant: f64,
    pub samples: Vec<BoundSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSample {
    pub z1_abs: f64,
    pub abs_value: f64,
    pub scaled: f64,
}

/// Samples `(1 + |z_1|) |E|` along the ray through `z_1` (the negative axis
/// when `z_1 = 0`) for `|z_1|` in `{0} U [1e-2, 1e4]` and fits the constant of
/// the decay bound `|E| <= C / (1 + |z_1|)`.
pub fn ml_bound_check(
    orders: &FractionalOrders,
    args: &MlArguments,
    policy: &RegimePolicy,
) -> Result<BoundReport> {
    let z1 = args.z1();
    let angle = if z1.norm() == 0.0 { PI } else { z1.arg() };
    let mut radii: Vec<f64> = std::iter::once(0.0)
        .chain((0..=24).map(|i| 10f64.powf(-2.0 + i as f64 / 4.0)))
        .chain(std::iter::once(z1.norm()))
        .collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();

    let mut samples = Vec::with_capacity(radii.len());
    for r in radii {
        let z = if r == 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::from_polar(r, angle) };
        let e = ml_eval(orders, &args.with_z1(z), policy)?.value.norm();
        samples.push(BoundSample { z1_abs: r, abs_value: e, scaled: (1.0 + r) * e });
    }
    let constant = samples.iter().map(|s| s.scaled).fold(0.0, f64::max);
    let abs_value = ml_eval(orders, args, policy)?.value.norm();
    Ok(BoundReport { abs_value, bound: constant / (1.0 + z1.norm()), constant, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiml::rgamma;

    #[test]
    fn half_order_bound_holds() {
        let o = FractionalOrders::single(0.5).unwrap();
        let args = MlArguments::real(1.0, &[-10.0]).unwrap();
        let report = ml_bound_check(&o, &args, &RegimePolicy::default()).unwrap();
        assert!(report.abs_value <= report.bound);
        assert!(report.constant >= rgamma(1.0));
        assert!(report.constant < 2.0);
    }

    #[test]
    fn two_term_scaled_values_stay_bounded() {
        let o = FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5]).unwrap();
        let args = MlArguments::real(1.8, &[-1e4, -0.5]).unwrap();
        let report = ml_bound_check(&o, &args, &RegimePolicy::default()).unwrap();
        let tail: Vec<f64> = report.samples.iter().filter(|s| s.z1_abs >= 1.0).map(|s| s.scaled).collect();
        let (lo, hi) = tail.iter().fold((f64::MAX, 0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo < 10.0, "{lo} {hi}");
    }
}
