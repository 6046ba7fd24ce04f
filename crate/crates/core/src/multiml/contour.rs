use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MlArguments, MlValue};
use crate::error::{Error, Result};
use crate::orders::FractionalOrders;
use crate::quadrature::{legendre_rule, PANEL_NODES};

/// How the arc radius is chosen when it is not given explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusRule {
    /// Smallest power of two with `R > K + K sum R^{rho_j/rho_1}`; enforced
    /// on validation.
    Admissible,
    /// `R = 1`. With real `z_j <= 0` and `|arg z_1| >= mu` every pole of the
    /// integrand has `|arg s| >= mu > theta`, so any radius is valid.
    Sector,
    /// The admissible radius unless its arc factor `exp(R^{1/rho_1})`
    /// exceeds `exp(MAX_ARC_EXPONENT)`, then the sector radius.
    Auto,
}

/// Largest `R^{1/rho_1}` the automatic rule accepts before switching to `R = 1`.
pub const MAX_ARC_EXPONENT: f64 = 8.0;

/// User-facing contour settings; angles default to fractions of `rho_1 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContourConfig {
    pub theta: Option<f64>,
    pub mu: Option<f64>,
    pub radius: Option<f64>,
    pub radius_rule: RadiusRule,
    pub theta_fraction: f64,
    pub mu_fraction: f64,
    pub n_arc: usize,
    pub n_ray: usize,
    pub tolerance: f64,
    pub max_refinements: usize,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self {
            theta: None,
            mu: None,
            radius: None,
            radius_rule: RadiusRule::Auto,
            theta_fraction: 0.7,
            mu_fraction: 0.9,
            n_arc: 64,
            n_ray: 256,
            tolerance: 1e-11,
            max_refinements: 3,
        }
    }
}

/// The path `gamma(R, theta)`: the ray `arg s = -theta` from infinity to
/// `|s| = R`, the arc `|s| = R, |arg s| <= theta`, and the ray `arg s = theta`
/// back out to `ray_cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub radius: f64,
    pub radius_rule: RadiusRule,
    pub theta: f64,
    pub mu: f64,
    pub n_arc: usize,
    pub n_ray: usize,
    pub ray_cutoff: f64,
    pub tolerance: f64,
    pub max_refinements: usize,
}

/// `e^{-45}`: the decay of `exp(s^{1/rho_1})` along a ray before it is cut.
const RAY_DECAY: f64 = 45.0;
const TAIL_FLOOR: f64 = 1e-18;

fn admissible(orders: &FractionalOrders, k_bound: f64, radius: f64) -> bool {
    let r1 = orders.leading();
    let sum: f64 = orders.rho()[1..].iter().map(|r| radius.powf(r / r1)).sum();
    radius > k_bound + k_bound * sum
}

impl ContourSpec {
    pub fn select(orders: &FractionalOrders, k_bound: f64, cfg: &ContourConfig) -> Result<Self> {
        let r1 = orders.leading();
        let theta = cfg.theta.unwrap_or(cfg.theta_fraction * r1 * PI);
        let mu = cfg.mu.unwrap_or(cfg.mu_fraction * r1 * PI);
        let ladder = || {
            (0..64)
                .map(|i| 2f64.powi(i))
                .find(|&r| admissible(orders, k_bound, r))
                .ok_or_else(|| Error::ContourViolation(format!("no admissible radius for K = {k_bound}")))
        };
        let radius = match (cfg.radius, cfg.radius_rule) {
            (Some(r), _) => r,
            (None, RadiusRule::Admissible) => ladder()?,
            (None, RadiusRule::Sector) => 1.0,
            (None, RadiusRule::Auto) => match ladder() {
                Ok(r) if r.powf(1.0 / r1) <= MAX_ARC_EXPONENT => r,
                _ => 1.0,
            },
        };
        let spec = Self {
            radius,
            radius_rule: cfg.radius_rule,
            theta,
            mu,
            n_arc: cfg.n_arc,
            n_ray: cfg.n_ray,
            ray_cutoff: Self::cutoff_for(r1, radius, theta),
            tolerance: cfg.tolerance,
            max_refinements: cfg.max_refinements,
        };
        spec.validate(orders, k_bound)?;
        Ok(spec)
    }

    /// `|s|` at which the ray factor `exp(|s|^{1/rho_1} cos(theta/rho_1))`
    /// has fallen by `RAY_DECAY` e-folds from the arc end and below
    /// `TAIL_FLOOR` relative to the arc maximum.
    fn cutoff_for(r1: f64, radius: f64, theta: f64) -> f64 {
        let c = (theta / r1).cos();
        if !(c < 0.0) {
            return f64::NAN;
        }
        let v_r = radius.powf(1.0 / r1);
        let by_decay = v_r + RAY_DECAY / c.abs();
        let by_floor = (v_r - TAIL_FLOOR.ln()) / c.abs();
        by_decay.max(by_floor).powf(r1)
    }

    pub fn validate(&self, orders: &FractionalOrders, k_bound: f64) -> Result<()> {
        let r1 = orders.leading();
        let (theta, mu) = (self.theta, self.mu);
        if !(r1 * PI / 2.0 < theta && theta < mu && mu < r1 * PI) {
            return Err(Error::ContourViolation(format!(
                "angles must satisfy rho1*pi/2 < theta < mu < rho1*pi, got theta = {theta}, mu = {mu}"
            )));
        }
        if !((theta / r1).cos() < 0.0) {
            return Err(Error::ContourViolation("cos(theta/rho1) must be negative".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite())
            || (self.radius_rule == RadiusRule::Admissible && !admissible(orders, k_bound, self.radius))
        {
            return Err(Error::ContourViolation(format!(
                "radius {} fails R > K + K*sum R^(rho_j/rho_1) with K = {k_bound}",
                self.radius
            )));
        }
        if self.n_arc < PANEL_NODES || self.n_ray < PANEL_NODES {
            return Err(Error::ContourViolation(format!(
                "at least {PANEL_NODES} nodes per piece are required"
            )));
        }
        if !(self.ray_cutoff > self.radius) {
            return Err(Error::ContourViolation(format!(
                "ray cutoff {} must exceed the radius {}",
                self.ray_cutoff, self.radius
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::ContourViolation("tolerance must be positive".into()));
        }
        Ok(())
    }

    /// True when `z_1` lies in the closed sector `mu <= |arg z_1| <= pi`.
    pub fn admits(&self, z1: Complex64) -> bool {
        z1 == Complex64::new(0.0, 0.0) || z1.arg().abs() >= self.mu
    }
}

/// Nodes `s_i` on the contour (or on its upper half, for real arguments,
/// where the two halves contribute complex conjugates) with weights that already include the
/// quadrature weight, `ds`, `exp(s^{1/rho_1}) s^{(1-beta)/rho_1}` and
/// `1/(2 rho_1 pi i)`, plus the powers `s^{rho_j/rho_1}` for `j >= 2`.
struct ContourRule {
    s: Vec<Complex64>,
    w: Vec<Complex64>,
    powers: Vec<Vec<Complex64>>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct RuleKey {
    orders: Vec<u64>,
    beta: u64,
    radius: u64,
    theta: u64,
    cutoff: u64,
    n_arc: usize,
    n_ray: usize,
    half: bool,
}

const RULE_CACHE_LIMIT: usize = 4096;

fn rule_cache() -> &'static RwLock<HashMap<RuleKey, Arc<ContourRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<ContourRule>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cached_rule(
    orders: &FractionalOrders,
    beta: f64,
    spec: &ContourSpec,
    n_arc: usize,
    n_ray: usize,
    half: bool,
) -> Arc<ContourRule> {
    let key = RuleKey {
        orders: orders.cache_key(),
        beta: beta.to_bits(),
        radius: spec.radius.to_bits(),
        theta: spec.theta.to_bits(),
        cutoff: spec.ray_cutoff.to_bits(),
        n_arc,
        n_ray,
        half,
    };
    if let Some(rule) = rule_cache().read().expect("rule cache poisoned").get(&key) {
        return rule.clone();
    }
    let rule = Arc::new(build_rule(orders, beta, spec, n_arc, n_ray, half));
    let mut cache = rule_cache().write().expect("rule cache poisoned");
    if cache.len() >= RULE_CACHE_LIMIT {
        cache.clear();
    }
    cache.entry(key).or_insert(rule).clone()
}

fn build_rule(
    orders: &FractionalOrders,
    beta: f64,
    spec: &ContourSpec,
    n_arc: usize,
    n_ray: usize,
    half: bool,
) -> ContourRule {
    let r1 = orders.leading();
    let exponents: Vec<f64> = orders.rho()[1..].iter().map(|r| r / r1).collect();
    let a = (1.0 - beta) / r1;
    let prefactor = Complex64::new(0.0, -1.0 / (2.0 * r1 * PI));
    let gl = legendre_rule(PANEL_NODES);

    let mut rule = ContourRule {
        s: Vec::new(),
        w: Vec::new(),
        powers: vec![Vec::new(); exponents.len()],
    };
    let mut push = |s: Complex64, w: Complex64, ln_abs: f64, arg: f64| {
        rule.s.push(s);
        rule.w.push(w * prefactor);
        for (p, e) in rule.powers.iter_mut().zip(&exponents) {
            p.push(Complex64::from_polar((e * ln_abs).exp(), e * arg));
        }
    };

    // arc, with enough panels to resolve the phase of exp(s^{1/rho_1})
    let (radius, theta) = (spec.radius, spec.theta);
    let v_r = radius.powf(1.0 / r1);
    let phase_span = 2.0 * theta * v_r / r1;
    let mut arc_panels = (n_arc / PANEL_NODES).max((phase_span / 3.0).ceil() as usize).max(2);
    let start = if half {
        arc_panels = arc_panels.div_ceil(2);
        0.0
    } else {
        -theta
    };
    let width = (theta - start) / arc_panels as f64;
    let ln_r = radius.ln();
    for p in 0..arc_panels {
        let lo = start + p as f64 * width;
        for (x, wx) in gl.nodes.iter().zip(&gl.weights) {
            let phi = lo + 0.5 * width * (x + 1.0);
            let s = Complex64::from_polar(radius, phi);
            let expo = Complex64::from_polar(v_r, phi / r1).exp();
            let algebraic = Complex64::from_polar((a * ln_r).exp(), a * phi);
            let ds = Complex64::new(0.0, 1.0) * s;
            push(s, expo * algebraic * ds * (0.5 * width * wx), ln_r, phi);
        }
    }

    // rays, parametrised by v = |s|^{1/rho_1} with panels graded towards the arc
    let v_end = spec.ray_cutoff.powf(1.0 / r1);
    let ray_panels = (n_ray / PANEL_NODES).max(1);
    let breaks: Vec<f64> = (0..=ray_panels)
        .map(|k| v_r + (v_end - v_r) * (k as f64 / ray_panels as f64).powf(1.5))
        .collect();
    let signs: &[f64] = if half { &[1.0] } else { &[-1.0, 1.0] };
    for &sign in signs {
        let angle = sign * theta;
        for pair in breaks.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let half = 0.5 * (hi - lo);
            for (x, wx) in gl.nodes.iter().zip(&gl.weights) {
                let v = lo + half * (x + 1.0);
                let ln_abs = r1 * v.ln();
                let s = Complex64::from_polar(ln_abs.exp(), angle);
                let expo = Complex64::from_polar(v, angle / r1).exp();
                let algebraic = Complex64::from_polar((a * ln_abs).exp(), a * angle);
                let ds = Complex64::from_polar(r1 * ((r1 - 1.0) * v.ln()).exp(), angle);
                push(s, expo * algebraic * ds * (sign * half * wx), ln_abs, angle);
            }
        }
    }
    rule
}

impl ContourRule {
    /// `sum_i w_i h(s_i)` and `sum_i |w_i h(s_i)|` for
    /// `h = 1/(s - z_1 - sum z_j s^{rho_j/rho_1})`.
    fn resolvent(&self, z1: Complex64, rest: &[f64]) -> (Complex64, f64) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for i in 0..self.s.len() {
            let mut den = self.s[i] - z1;
            for (p, zj) in self.powers.iter().zip(rest) {
                den -= p[i] * *zj;
            }
            let term = self.w[i] * den.conj() / den.norm_sqr();
            sum += term;
            abs_sum += term.l1_norm();
        }
        (sum, abs_sum)
    }

    /// `sum_i w_i Q(s_i)^{m}` for `m = 0..count` with
    /// `Q = s - sum z_j s^{rho_j/rho_1}`.
    fn moments(&self, rest: &[f64], count: usize) -> (Vec<Complex64>, Vec<f64>) {
        let mut sums = vec![Complex64::new(0.0, 0.0); count];
        let mut abs = vec![0.0; count];
        for i in 0..self.s.len() {
            let mut q = self.s[i];
            for (p, zj) in self.powers.iter().zip(rest) {
                q -= p[i] * *zj;
            }
            let mut term = self.w[i];
            for m in 0..count {
                sums[m] += term;
                abs[m] += term.l1_norm();
                term *= q;
            }
        }
        (sums, abs)
    }
}

/// Runs `eval` on the base resolution and on successive doublings until two
/// consecutive results agree to the contour tolerance.
pub(super) fn refine<T>(
    spec: &ContourSpec,
    mut eval: impl FnMut(usize, usize) -> T,
    mut compare: impl FnMut(&T, &T) -> (f64, f64),
) -> Result<(T, f64)> {
    let (mut n_arc, mut n_ray) = (spec.n_arc, spec.n_ray);
    let mut coarse = eval(n_arc, n_ray);
    let mut worst = f64::INFINITY;
    for _ in 0..=spec.max_refinements {
        n_arc *= 2;
        n_ray *= 2;
        let fine = eval(n_arc, n_ray);
        let (change, allowed) = compare(&coarse, &fine);
        if change <= allowed {
            return Ok((fine, change));
        }
        worst = change / allowed * spec.tolerance;
        coarse = fine;
    }
    Err(Error::QuadratureDivergence { change: worst, tolerance: spec.tolerance })
}

pub(super) fn check_contour_args(
    orders: &FractionalOrders,
    args: &MlArguments,
    spec: &ContourSpec,
) -> Result<Vec<f64>> {
    args.check_len(orders)?;
    let rest = args.secondary_nonpositive().ok_or_else(|| {
        Error::ContourViolation("secondary arguments must be real and non-positive".into())
    })?;
    spec.validate(orders, args.secondary_bound())?;
    if !spec.admits(args.z1()) {
        return Err(Error::ContourViolation(format!(
            "|arg z1| = {} is inside the sector bound mu = {}",
            args.z1().arg().abs(),
            spec.mu
        )));
    }
    Ok(rest)
}

/// Quadrature of the contour representation over `gamma(R, theta)`.
pub fn ml_contour(orders: &FractionalOrders, args: &MlArguments, spec: &ContourSpec) -> Result<MlValue> {
    let rest = check_contour_args(orders, args, spec)?;
    let z1 = args.z1();
    let half = args.is_real();
    let noise = 64.0 * f64::EPSILON;
    let ((value, abs_sum), change) = refine(
        spec,
        |n_arc, n_ray| {
            let (sum, abs) = cached_rule(orders, args.beta(), spec, n_arc, n_ray, half).resolvent(z1, &rest);
            if half {
                (Complex64::new(2.0 * sum.re, 0.0), 2.0 * abs)
            } else {
                (sum, abs)
            }
        },
        |coarse, fine| {
            let change = (coarse.0 - fine.0).norm();
            (change, (spec.tolerance * fine.0.norm()).max(noise * fine.1))
        },
    )?;
    Ok(MlValue { value, est_error: change + noise * abs_sum })
}

/// Contour moments `(1/(2 rho_1 pi i)) int exp(s^{1/rho_1}) s^{(1-beta)/rho_1} Q^m ds`
/// for `m = 0..count`.
pub(super) fn contour_moments(
    orders: &FractionalOrders,
    beta: f64,
    rest: &[f64],
    count: usize,
    spec: &ContourSpec,
) -> Result<Vec<Complex64>> {
    let noise = 64.0 * f64::EPSILON;
    let ((sums, _), _) = refine(
        spec,
        |n_arc, n_ray| {
            let (sums, abs) = cached_rule(orders, beta, spec, n_arc, n_ray, true).moments(rest, count);
            let sums = sums.into_iter().map(|v| Complex64::new(2.0 * v.re, 0.0)).collect::<Vec<_>>();
            (sums, abs.into_iter().map(|a| 2.0 * a).collect::<Vec<_>>())
        },
        |coarse, fine| {
            let mut ratio: f64 = 0.0;
            for m in 0..count {
                let change = (coarse.0[m] - fine.0[m]).norm();
                let allowed = (spec.tolerance * fine.0[m].norm()).max(noise * fine.1[m]);
                ratio = ratio.max(change / allowed);
            }
            (ratio, 1.0)
        },
    )?;
    Ok(sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiml::ml_series;

    fn spec_for(orders: &FractionalOrders, args: &MlArguments) -> ContourSpec {
        ContourSpec::select(orders, args.secondary_bound(), &ContourConfig::default()).unwrap()
    }

    fn contour(orders: &FractionalOrders, beta: f64, z: &[f64]) -> MlValue {
        let args = MlArguments::real(beta, z).unwrap();
        ml_contour(orders, &args, &spec_for(orders, &args)).unwrap()
    }

    #[test]
    fn half_order_erfc_identity() {
        let o = FractionalOrders::single(0.5).unwrap();
        let v = contour(&o, 1.0, &[-4.0]);
        let exact = 16f64.exp() * libm::erfc(4.0);
        assert!((v.value.re - exact).abs() < 1e-12, "{} vs {exact}", v.value.re);
        assert!(v.value.im.abs() < 1e-13);
    }

    #[test]
    fn agrees_with_reference_at_large_argument() {
        // high-precision summation of the series
        let o = FractionalOrders::single(0.8).unwrap();
        let v = contour(&o, 1.6, &[-50.0]).value.re;
        assert!((v / 0.017_177_274_078_216_77 - 1.0).abs() < 1e-10, "{v}");
        let v = contour(&o, 1.8, &[-1e4]).value.re;
        assert!((v / 0.000_099_997_821_480_625_76 - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn agrees_with_series_for_two_terms() {
        let o = FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap();
        let c = contour(&o, 0.8, &[-2.0, -1.0]);
        assert!((c.value.re - 0.082_973_286_751_511_90).abs() < 1e-12, "{:?}", c);
        let o3 = FractionalOrders::new(vec![0.9, 0.6, 0.3], vec![1.0, 1.0, 1.0]).unwrap();
        let c3 = contour(&o3, 1.2, &[-3.0, -0.7, -0.4]);
        assert!((c3.value.re - 0.140_177_131_782_808_0).abs() < 1e-12, "{:?}", c3);
    }

    #[test]
    fn complex_argument_matches_series() {
        let o = FractionalOrders::new(vec![0.7, 0.2], vec![1.0, 1.0]).unwrap();
        let z1 = Complex64::from_polar(3.0, 0.95 * PI * 0.7 + 0.1);
        let args = MlArguments::new(1.1, vec![z1, Complex64::new(-0.4, 0.0)]).unwrap();
        let c = ml_contour(&o, &args, &spec_for(&o, &args)).unwrap().value;
        let s = ml_series(&o, &args, 1e-18).unwrap().value;
        assert!((c - s).norm() < 1e-10 * s.norm(), "{c} vs {s}");
    }

    #[test]
    fn radius_ladder_respects_admissibility() {
        let o = FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 1.0]).unwrap();
        let cfg = ContourConfig { radius_rule: RadiusRule::Admissible, ..Default::default() };
        let spec = ContourSpec::select(&o, 3.0, &cfg).unwrap();
        assert!(admissible(&o, 3.0, spec.radius));
        assert!(!admissible(&o, 3.0, spec.radius / 2.0));
    }

    #[test]
    fn sector_radius_handles_large_secondary_arguments() {
        // the admissible radius here is 32, whose arc factor exp(32^{1/0.7})
        // would swamp the result
        let o = FractionalOrders::new(vec![0.7, 0.4, 0.1], vec![1.0, 0.3, 2.0]).unwrap();
        let args = MlArguments::for_mode(&o, 0.7, 1.0, 0.8).unwrap();
        let spec = spec_for(&o, &args);
        assert_eq!(spec.radius, 1.0);
        let c = ml_contour(&o, &args, &spec).unwrap();
        let s = ml_series(&o, &args, 1e-18).unwrap();
        assert!((c.value - s.value).norm() < 1e-12 + s.est_error, "{c:?} {s:?}");
        let adm = ContourConfig { radius_rule: RadiusRule::Admissible, ..Default::default() };
        let big = ContourSpec::select(&o, args.secondary_bound(), &adm).unwrap();
        assert!(big.radius > 8.0);
    }

    #[test]
    fn violations_are_reported() {
        let o = FractionalOrders::single(0.6).unwrap();
        let cfg = ContourConfig { theta: Some(0.95 * 0.6 * PI), mu: Some(0.9 * 0.6 * PI), ..Default::default() };
        assert!(matches!(ContourSpec::select(&o, 0.0, &cfg), Err(Error::ContourViolation(_))));

        let o2 = FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 1.0]).unwrap();
        let cfg = ContourConfig { radius: Some(1.0), radius_rule: RadiusRule::Admissible, ..Default::default() };
        assert!(matches!(ContourSpec::select(&o2, 2.0, &cfg), Err(Error::ContourViolation(_))));

        let args = MlArguments::real(1.0, &[3.0]).unwrap();
        let spec = spec_for(&o, &args);
        assert!(matches!(ml_contour(&o, &args, &spec), Err(Error::ContourViolation(_))));
    }
}
