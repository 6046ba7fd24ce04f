use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::asymptotic::ml_asymptotic;
use super::contour::{ml_contour, ContourConfig, ContourSpec};
use super::series::{ml_series_with, SeriesConfig};
use super::{MlArguments, MlValue};
use crate::error::{Error, Result};
use crate::orders::FractionalOrders;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Series,
    Contour,
    Asymptotic,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Series => "series",
            Regime::Contour => "contour",
            Regime::Asymptotic => "asymptotic",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegimePolicy {
    /// Largest `|z_1|` handed to the series when the contour does not apply.
    pub series_threshold: f64,
    /// The series is preferred over the contour while the root `s*` of
    /// [`series_peak_root`] stays below this radius.
    pub series_radius: f64,
    /// `|z_1|` above which the asymptotic expansion is used; off by default.
    pub asymptotic_threshold: Option<f64>,
    pub asymptotic_terms: usize,
    pub series: SeriesConfig,
    pub contour: ContourConfig,
}

impl Default for RegimePolicy {
    fn default() -> Self {
        Self {
            series_threshold: 30.0,
            series_radius: 0.5,
            asymptotic_threshold: None,
            asymptotic_terms: 4,
            series: SeriesConfig::default(),
            contour: ContourConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub est_error: f64,
    pub regime: Regime,
}

impl Evaluation {
    fn from(v: MlValue, regime: Regime) -> Self {
        Self { value: v.value, est_error: v.est_error, regime }
    }
}

/// Largest root `s*` of `s = |z_1| + sum |z_j| s^{rho_j/rho_1}`. The series
/// terms grow to roughly `exp(s*^{1/rho_1})` before decaying, so this
/// measures both the cancellation and the number of levels needed.
pub fn series_peak_root(orders: &FractionalOrders, args: &MlArguments) -> f64 {
    let r1 = orders.leading();
    let abs: Vec<f64> = args.z().iter().map(|z| z.norm()).collect();
    let mut s = abs.iter().sum::<f64>();
    for _ in 0..200 {
        let next = abs[0]
            + abs[1..]
                .iter()
                .zip(&orders.rho()[1..])
                .map(|(a, r)| a * s.powf(r / r1))
                .sum::<f64>();
        if (next - s).abs() <= 1e-12 * next {
            s = next;
            break;
        }
        s = next;
    }
    s
}

/// Picks a regime for `args` and evaluates it.
pub fn ml_eval(orders: &FractionalOrders, args: &MlArguments, policy: &RegimePolicy) -> Result<Evaluation> {
    args.check_len(orders)?;
    let z1 = args.z1();
    let contour = args
        .secondary_nonpositive()
        .map(|_| ContourSpec::select(orders, args.secondary_bound(), &policy.contour))
        .transpose()?
        .filter(|spec| spec.admits(z1));

    if let (Some(threshold), Some(spec)) = (policy.asymptotic_threshold, &contour) {
        if args.beta() > 2.0 * orders.leading() && z1.norm() >= threshold {
            let v = ml_asymptotic(orders, args, policy.asymptotic_terms, spec)?;
            return Ok(Evaluation::from(v, Regime::Asymptotic));
        }
    }

    let small = z1.norm() <= policy.series_threshold;
    let cheap = series_peak_root(orders, args) <= policy.series_radius;
    if small && (cheap || contour.is_none()) {
        match ml_series_with(orders, args, &policy.series) {
            Ok(v) => return Ok(Evaluation::from(v, Regime::Series)),
            Err(e) if contour.is_none() => return Err(e),
            Err(_) => {}
        }
    }
    match contour {
        Some(spec) => Ok(Evaluation::from(ml_contour(orders, args, &spec)?, Regime::Contour)),
        None => Err(Error::AllRegimesFailed(format!(
            "|z1| = {} exceeds the series threshold {} and the contour needs mu <= |arg z1| with real non-positive z_j",
            z1.norm(),
            policy.series_threshold
        ))),
    }
}

/// `E_{rho',beta}(-lambda t^{rho_1}, -q_2 t^{rho_1-rho_2}, ...)`, the real
/// function appearing in the mode solutions.
pub fn ml_mode(
    orders: &FractionalOrders,
    beta: f64,
    lambda: f64,
    t: f64,
    policy: &RegimePolicy,
) -> Result<f64> {
    let args = MlArguments::for_mode(orders, beta, lambda, t)?;
    Ok(ml_eval(orders, &args, policy)?.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiml::rgamma;

    #[test]
    fn zero_arguments_give_reciprocal_gamma() {
        let o = FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5]).unwrap();
        let args = MlArguments::real(1.3, &[0.0, 0.0]).unwrap();
        let e = ml_eval(&o, &args, &RegimePolicy::default()).unwrap();
        assert_eq!(e.regime, Regime::Series);
        assert!((e.value.re - rgamma(1.3)).abs() < 1e-16);
    }

    #[test]
    fn small_argument_uses_series() {
        let o = FractionalOrders::single(0.5).unwrap();
        let args = MlArguments::real(1.0, &[-0.5]).unwrap();
        assert_eq!(ml_eval(&o, &args, &RegimePolicy::default()).unwrap().regime, Regime::Series);
        let wide = MlArguments::real(1.0, &[-2.0]).unwrap();
        assert_eq!(ml_eval(&o, &wide, &RegimePolicy::default()).unwrap().regime, Regime::Contour);
    }

    #[test]
    fn large_argument_uses_contour() {
        let o = FractionalOrders::single(0.8).unwrap();
        let args = MlArguments::real(1.8, &[-1e4]).unwrap();
        let e = ml_eval(&o, &args, &RegimePolicy::default()).unwrap();
        assert_eq!(e.regime, Regime::Contour);
        assert!((e.value.re - 0.000_099_997_821_480_625_76).abs() < 1e-9 * 1e-4);
    }

    #[test]
    fn moderate_argument_with_small_order_avoids_cancellation() {
        // e^{100} erfc(10) for rho = 1/2, where the series would lose all digits
        let o = FractionalOrders::single(0.5).unwrap();
        let args = MlArguments::real(1.0, &[-10.0]).unwrap();
        let e = ml_eval(&o, &args, &RegimePolicy::default()).unwrap();
        assert_eq!(e.regime, Regime::Contour);
        let exact = 100f64.exp() * libm::erfc(10.0);
        assert!((e.value.re / exact - 1.0).abs() < 1e-11, "{}", e.value.re);
    }

    #[test]
    fn positive_large_argument_has_no_regime() {
        let o = FractionalOrders::single(0.5).unwrap();
        let args = MlArguments::real(1.0, &[100.0]).unwrap();
        assert!(matches!(
            ml_eval(&o, &args, &RegimePolicy::default()),
            Err(Error::AllRegimesFailed(_))
        ));
    }

    #[test]
    fn asymptotic_regime_on_request() {
        let o = FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5]).unwrap();
        let policy = RegimePolicy { asymptotic_threshold: Some(1e5), ..Default::default() };
        let args = MlArguments::real(1.8, &[-1e6, -0.5]).unwrap();
        assert_eq!(ml_eval(&o, &args, &policy).unwrap().regime, Regime::Asymptotic);
        let low = MlArguments::real(0.8, &[-1e6, -0.5]).unwrap();
        assert_eq!(ml_eval(&o, &low, &policy).unwrap().regime, Regime::Contour);
    }
}
