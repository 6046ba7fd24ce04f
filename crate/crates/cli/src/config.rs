//! The `tfsource.problem/1` configuration document.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tfsource_core::fracode::{GProfile, Settings, SourceTimeProfile};
use tfsource_core::inverse::{FreeCoefficientPolicy, InverseSettings, SmoothnessPolicy};
use tfsource_core::multiml::{ContourConfig, RadiusRule, RegimePolicy, SeriesConfig};
use tfsource_core::quadrature::AdaptiveSpec;
use tfsource_core::torus::EllipticSymbol;
use tfsource_core::FractionalOrders;

pub const SCHEMA: &str = "tfsource.problem/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub schema: String,
    pub orders: FractionalOrders,
    pub symbol: EllipticSymbol,
    pub g: GProfile,
    /// Observation time of the overdetermination condition.
    pub t0: f64,
    /// Final time `T`.
    pub horizon: f64,
    /// Per-axis frequency bound.
    pub cutoff: usize,
    /// Grid points per axis for grid output; defaults to `2 cutoff + 2`.
    #[serde(default)]
    pub grid_points: Option<usize>,
    /// Times at which `u` is written.
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Sobolev exponent of the smoothness check; defaults to `N/2 + 1/2`.
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub contour: ContourOverrides,
    #[serde(default)]
    pub free_coefficients: FreeCoefficientPolicy,
    #[serde(default)]
    pub smoothness: SmoothnessPolicy,
    #[serde(default)]
    pub data: DataSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub series: f64,
    pub quadrature_rel: f64,
    pub quadrature_abs: f64,
    pub contour: f64,
    pub degeneracy: f64,
    pub zero_mode: f64,
    pub compatibility: f64,
    /// Largest accepted relative series/contour deviation in `ml-eval`.
    pub agreement: f64,
    /// Relative bound on `|u(., t0) - Psi|`.
    pub overdetermination: f64,
    /// Relative bound on `|u(., 0+) - phi|`.
    pub initial: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            series: 1e-17,
            quadrature_rel: 1e-12,
            quadrature_abs: 1e-15,
            contour: 1e-11,
            degeneracy: 1e-8,
            zero_mode: 1e-12,
            compatibility: 1e-8,
            agreement: 1e-7,
            overdetermination: 1e-9,
            initial: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContourOverrides {
    pub theta: Option<f64>,
    pub mu: Option<f64>,
    pub radius: Option<f64>,
    pub radius_rule: RadiusRule,
}

impl Default for ContourOverrides {
    fn default() -> Self {
        Self { theta: None, mu: None, radius: None, radius_rule: RadiusRule::Auto }
    }
}

/// A field on the torus, either generated or read from a file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    #[default]
    Zero,
    /// Real field with independent uniform coefficients of size
    /// `amplitude (1 + |n|^2)^{-decay/2}`.
    Random {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "two")]
        decay: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Modes { values: Vec<ModeValue> },
    /// Coefficient CSV: `n1,..,nN,re,im`.
    Coefficients { path: PathBuf },
    /// Grid CSV: `x1,..,xN,value`.
    Grid { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeValue {
    pub n: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSpec {
    pub phi: FieldSpec,
    pub psi: Option<FieldSpec>,
    pub f: FieldSpec,
}

/// Negative-axis sweep for `ml-eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub beta: f64,
    /// `z_2, .., z_M`; defaults to `-q_j`.
    pub secondary: Option<Vec<f64>>,
    /// The sweep covers `z_1` in `[-z_max, -z_min]`, log-spaced.
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
    pub asymptotic_terms: Vec<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { beta: 1.8, secondary: None, z_min: 10.0, z_max: 1e5, points: 17, asymptotic_terms: vec![1, 2, 3] }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub cutoff: Option<usize>,
    pub t0: Option<f64>,
    pub seed: Option<u64>,
}

impl ProblemConfig {
    pub fn load(path: &Path, overrides: Overrides) -> Result<(Self, Vec<String>)> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: Self =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.apply(overrides);
        let warnings = cfg.validate()?;
        Ok((cfg, warnings))
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(c) = o.cutoff {
            self.cutoff = c;
        }
        if let Some(t) = o.t0 {
            self.t0 = t;
        }
        if let Some(s) = o.seed {
            self.seed = Some(s);
        }
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |spec: &mut FieldSpec| match spec {
            FieldSpec::Coefficients { path } | FieldSpec::Grid { path } if path.is_relative() => {
                *path = base.join(&*path);
            }
            _ => {}
        };
        fix(&mut self.data.phi);
        fix(&mut self.data.f);
        if let Some(psi) = self.data.psi.as_mut() {
            fix(psi);
        }
    }

    /// Hard errors for violated invariants; soft ones are returned as warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        ensure!(self.schema == SCHEMA, "unsupported schema {:?}, expected {SCHEMA:?}", self.schema);
        ensure!(self.horizon > 0.0 && self.horizon.is_finite(), "horizon must be positive, got {}", self.horizon);
        ensure!(
            self.t0 > 0.0 && self.t0 <= self.horizon,
            "t0 must lie in (0, {}], got {}",
            self.horizon,
            self.t0
        );
        ensure!(self.cutoff >= 1, "cutoff must be at least 1");
        ensure!(
            self.grid_points() > 2 * self.cutoff,
            "grid_points {} cannot resolve cutoff {}",
            self.grid_points(),
            self.cutoff
        );
        for &t in &self.times {
            ensure!((0.0..=self.horizon).contains(&t), "output time {t} outside [0, {}]", self.horizon);
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("series", t.series),
            ("quadrature_rel", t.quadrature_rel),
            ("quadrature_abs", t.quadrature_abs),
            ("contour", t.contour),
            ("degeneracy", t.degeneracy),
            ("zero_mode", t.zero_mode),
            ("compatibility", t.compatibility),
            ("agreement", t.agreement),
            ("overdetermination", t.overdetermination),
            ("initial", t.initial),
        ] {
            ensure!(v > 0.0 && v.is_finite(), "tolerance {name} must be positive, got {v}");
        }
        let half_dim = self.symbol.dim() as f64 / 2.0;
        if let Some(tau) = self.tau {
            if tau <= half_dim {
                warnings.push(format!("tau = {tau} does not exceed N/2 = {half_dim}"));
            }
        }
        self.profile()?;
        let s = &self.sweep;
        ensure!(s.beta > 0.0, "sweep beta must be positive");
        ensure!(0.0 < s.z_min && s.z_min <= s.z_max, "sweep needs 0 < z_min <= z_max");
        ensure!(s.points >= 2, "sweep needs at least two points");
        if let Some(sec) = &s.secondary {
            ensure!(
                sec.len() + 1 == self.orders.len(),
                "sweep has {} secondary arguments for {} orders",
                sec.len(),
                self.orders.len()
            );
        }
        Ok(warnings)
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points.unwrap_or(2 * self.cutoff + 2)
    }

    pub fn profile(&self) -> Result<SourceTimeProfile> {
        Ok(SourceTimeProfile::new(self.g.clone(), self.horizon)?)
    }

    pub fn regime(&self) -> RegimePolicy {
        let c = &self.contour;
        RegimePolicy {
            series: SeriesConfig { tol: self.tolerances.series, ..SeriesConfig::default() },
            contour: ContourConfig {
                theta: c.theta,
                mu: c.mu,
                radius: c.radius,
                radius_rule: c.radius_rule,
                tolerance: self.tolerances.contour,
                ..ContourConfig::default()
            },
            ..RegimePolicy::default()
        }
    }

    pub fn settings(&self) -> Settings {
        Settings {
            regime: self.regime(),
            quadrature: AdaptiveSpec {
                abs_tol: self.tolerances.quadrature_abs,
                rel_tol: self.tolerances.quadrature_rel,
                ..AdaptiveSpec::default()
            },
        }
    }

    pub fn inverse_settings(&self) -> InverseSettings {
        InverseSettings {
            solver: self.settings(),
            degeneracy_eps: self.tolerances.degeneracy,
            zero_mode_eps: self.tolerances.zero_mode,
            compatibility_rel: self.tolerances.compatibility,
            tau: self.tau,
            smoothness: self.smoothness,
            free_coefficients: self.free_coefficients.clone(),
        }
    }

    pub fn sweep_secondary(&self) -> Vec<f64> {
        self.sweep.secondary.clone().unwrap_or_else(|| self.orders.q()[1..].iter().map(|q| -q).collect())
    }

    /// Pretty JSON with every field spelled out.
    pub fn to_canonical_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn sha256(&self) -> Result<String> {
        Ok(format!("{:x}", Sha256::digest(self.to_canonical_json()?.as_bytes())))
    }

    /// Seed for a generated field: its own, else the run seed, else zero.
    pub fn field_seed(&self, own: Option<u64>, salt: u64) -> u64 {
        own.or(self.seed).unwrap_or(0).wrapping_add(salt)
    }

    /// A complete default problem: two-term operator on `T^1`, `g = 1 + t`.
    pub fn example() -> Self {
        Self {
            schema: SCHEMA.into(),
            orders: FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5]).expect("valid orders"),
            symbol: EllipticSymbol::laplacian(1).expect("valid symbol"),
            g: GProfile::Polynomial { coefficients: vec![1.0, 1.0] },
            t0: 0.5,
            horizon: 1.0,
            cutoff: 16,
            grid_points: None,
            times: vec![0.25, 0.5, 1.0],
            tolerances: Tolerances::default(),
            tau: None,
            contour: ContourOverrides::default(),
            free_coefficients: FreeCoefficientPolicy::Zero,
            smoothness: SmoothnessPolicy::Warn,
            data: DataSpec {
                phi: FieldSpec::Random { amplitude: 1.0, decay: 2.0, seed: Some(1) },
                psi: None,
                f: FieldSpec::Random { amplitude: 1.0, decay: 2.0, seed: Some(2) },
            },
            sweep: SweepSpec::default(),
            seed: None,
            output_dir: None,
        }
    }
}

pub fn parse_str(text: &str) -> Result<ProblemConfig> {
    let cfg: ProblemConfig = serde_json::from_str(text)?;
    if let Err(e) = cfg.validate() {
        bail!("invalid configuration: {e}");
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_example_matches_builtin() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/example.json");
        let (cfg, warnings) = ProblemConfig::load(&path, Overrides::default()).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(cfg.to_canonical_json().unwrap(), ProblemConfig::example().to_canonical_json().unwrap());
    }

    #[test]
    fn round_trip_is_idempotent() {
        let cfg = ProblemConfig::example();
        let once = cfg.to_canonical_json().unwrap();
        let back = parse_str(&once).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_canonical_json().unwrap(), once);
    }

    #[test]
    fn minimal_document_takes_defaults() {
        let text = r#"{
            "schema": "tfsource.problem/1",
            "orders": {"rho": [0.6], "q": [1.0]},
            "symbol": {"dim": 1, "order": 2, "terms": [{"alpha": [2], "coeff": -1.0}]},
            "g": {"kind": "constant", "value": 1.0},
            "t0": 0.5, "horizon": 1.0, "cutoff": 4
        }"#;
        let cfg = parse_str(text).unwrap();
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.grid_points(), 10);
        assert_eq!(cfg.data.phi, FieldSpec::Zero);
    }

    #[test]
    fn invariants_enforced() {
        let mut cfg = ProblemConfig::example();
        cfg.t0 = 2.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ProblemConfig::example();
        cfg.cutoff = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ProblemConfig::example();
        cfg.tolerances.series = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ProblemConfig::example();
        cfg.schema = "tfsource.problem/0".into();
        assert!(cfg.validate().is_err());
        let mut cfg = ProblemConfig::example();
        cfg.tau = Some(0.4);
        assert_eq!(cfg.validate().unwrap().len(), 1);
        let bad_orders = ProblemConfig::example().to_canonical_json().unwrap().replace("0.3", "0.9");
        assert!(parse_str(&bad_orders).is_err());
    }

    #[test]
    fn overrides_apply() {
        let mut cfg = ProblemConfig::example();
        cfg.apply(Overrides { cutoff: Some(3), t0: Some(0.1), seed: Some(9) });
        assert_eq!((cfg.cutoff, cfg.t0, cfg.seed), (3, 0.1, Some(9)));
        assert_eq!(cfg.field_seed(None, 1), 10);
        assert_eq!(cfg.field_seed(Some(4), 1), 5);
    }
}
