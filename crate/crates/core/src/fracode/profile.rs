use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed-form or tabulated time factor `g(t)` of the source `f(x) g(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GProfile {
    Constant { value: f64 },
    /// `amplitude * exp(rate * t)`
    Exponential { amplitude: f64, rate: f64 },
    /// `amplitude * cos(omega * t + phase)`
    Cosine {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Ascending coefficients, `c_0 + c_1 t + ...`.
    Polynomial { coefficients: Vec<f64> },
    /// Natural cubic spline through the samples.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl GProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            GProfile::Constant { value } => *value,
            GProfile::Exponential { amplitude, rate } => amplitude * (rate * t).exp(),
            GProfile::Cosine { amplitude, omega, phase } => amplitude * (omega * t + phase).cos(),
            GProfile::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
            GProfile::Tabulated { times, values } => Spline::new(times, values).eval(t).0,
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            GProfile::Constant { .. } => 0.0,
            GProfile::Exponential { amplitude, rate } => amplitude * rate * (rate * t).exp(),
            GProfile::Cosine { amplitude, omega, phase } => {
                -amplitude * omega * (omega * t + phase).sin()
            }
            GProfile::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + i as f64 * c),
            GProfile::Tabulated { times, values } => Spline::new(times, values).eval(t).1,
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match self {
            GProfile::Constant { value } => value.is_finite(),
            GProfile::Exponential { amplitude, rate } => finite(&[*amplitude, *rate]),
            GProfile::Cosine { amplitude, omega, phase } => finite(&[*amplitude, *omega, *phase]),
            GProfile::Polynomial { coefficients } => !coefficients.is_empty() && finite(coefficients),
            GProfile::Tabulated { times, values } => {
                times.len() >= 2
                    && times.len() == values.len()
                    && finite(times)
                    && finite(values)
                    && times.windows(2).all(|w| w[0] < w[1])
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidProfile(format!("malformed parameters in {self:?}")))
        }
    }
}

/// Natural cubic spline; second derivatives solved on construction.
struct Spline<'a> {
    x: &'a [f64],
    y: &'a [f64],
    m: Vec<f64>,
}

impl<'a> Spline<'a> {
    fn new(x: &'a [f64], y: &'a [f64]) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second derivatives
            let mut diag = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            for i in 1..n - 1 {
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                diag[i] = 2.0 * (h0 + h1);
                rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 2..n - 1 {
                let h = x[i] - x[i - 1];
                let factor = h / diag[i - 1];
                diag[i] -= factor * h;
                rhs[i] -= factor * rhs[i - 1];
            }
            for i in (1..n - 1).rev() {
                let upper = if i + 1 < n - 1 { (x[i + 1] - x[i]) * m[i + 1] } else { 0.0 };
                m[i] = (rhs[i] - upper) / diag[i];
            }
        }
        Self { x, y, m }
    }

    /// Value and first derivative; linear extrapolation outside the knots.
    fn eval(&self, t: f64) -> (f64, f64) {
        let (x, y, m) = (self.x, self.y, &self.m);
        let n = x.len();
        let i = match x.partition_point(|&v| v <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - t) / h;
        let b = (t - x[i]) / h;
        let value = a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
        let slope = (y[i + 1] - y[i]) / h
            - (3.0 * a * a - 1.0) / 6.0 * h * m[i]
            + (3.0 * b * b - 1.0) / 6.0 * h * m[i + 1];
        (value, slope)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    SignPreserving,
    SignChanging,
}

/// Number of uniform samples used to classify a profile.
pub const CLASSIFY_SAMPLES: usize = 1024;
/// Floor on `min |g|` for a profile to count as sign-preserving.
pub const SIGN_FLOOR: f64 = 1e-12;

/// A profile together with its sign class and sup-norm on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceTimeProfile {
    profile: GProfile,
    kind: ProfileKind,
    horizon: f64,
    norm: f64,
    min_abs: f64,
}

impl SourceTimeProfile {
    pub fn new(profile: GProfile, horizon: f64) -> Result<Self> {
        profile.validate()?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidProfile(format!("horizon must be positive, got {horizon}")));
        }
        if let GProfile::Tabulated { times, .. } = &profile {
            if times[0] > 0.0 || *times.last().unwrap() < horizon {
                return Err(Error::InvalidProfile(format!(
                    "samples cover [{}, {}] but [0, {horizon}] is required",
                    times[0],
                    times.last().unwrap()
                )));
            }
        }
        let samples: Vec<f64> = (0..CLASSIFY_SAMPLES)
            .map(|i| profile.eval(horizon * i as f64 / (CLASSIFY_SAMPLES - 1) as f64))
            .collect();
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("profile is not finite on [0, T]".into()));
        }
        let norm = samples.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
        let min_abs = samples.iter().fold(f64::INFINITY, |a: f64, v| a.min(v.abs()));
        let same_sign = samples.iter().all(|v| *v > 0.0) || samples.iter().all(|v| *v < 0.0);
        let kind = if same_sign && min_abs > SIGN_FLOOR {
            ProfileKind::SignPreserving
        } else {
            ProfileKind::SignChanging
        };
        if kind == ProfileKind::SignChanging && profile.eval(0.0).abs() <= SIGN_FLOOR {
            return Err(Error::InvalidProfile(
                "a sign-changing profile needs g(0) != 0".into(),
            ));
        }
        Ok(Self { profile, kind, horizon, norm, min_abs })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.profile.eval(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.profile.deriv(t)
    }

    pub fn profile(&self) -> &GProfile {
        &self.profile
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Sampled `sup |g|` on `[0, T]`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Sampled `min |g|` on `[0, T]`.
    pub fn min_abs(&self) -> f64 {
        self.min_abs
    }
}
