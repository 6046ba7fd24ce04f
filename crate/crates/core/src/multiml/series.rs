use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{rgamma, MlArguments, MlValue};
use crate::error::{Error, Result};
use crate::orders::FractionalOrders;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeriesConfig {
    /// A level `k` is negligible once the sum of its term magnitudes is
    /// below this absolute tolerance.
    pub tol: f64,
    pub max_k: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { tol: 1e-17, max_k: 600 }
    }
}

/// Truncated double sum over levels `k` and compositions of `k`.
pub fn ml_series(orders: &FractionalOrders, args: &MlArguments, tol: f64) -> Result<MlValue> {
    ml_series_with(orders, args, &SeriesConfig { tol, ..SeriesConfig::default() })
}

/// Visits every composition `k_1 + ... + k_m = k` with its multinomial
/// coefficient, carried as a product of incrementally updated binomials.
fn compositions(m: usize, k: usize, visit: &mut impl FnMut(f64, &[usize])) {
    fn recurse(j: usize, remaining: usize, coeff: f64, counts: &mut [usize], visit: &mut impl FnMut(f64, &[usize])) {
        if j + 1 == counts.len() {
            counts[j] = remaining;
            visit(coeff, counts);
            return;
        }
        let mut binom = 1.0;
        for kj in 0..=remaining {
            if kj > 0 {
                binom *= (remaining - kj + 1) as f64 / kj as f64;
            }
            counts[j] = kj;
            recurse(j + 1, remaining - kj, coeff * binom, counts, visit);
        }
    }
    let mut counts = vec![0usize; m];
    recurse(0, k, 1.0, &mut counts, visit);
}

/// `multinomial / Gamma(beta + sum k_j rho'_j)` for the first levels. These
/// depend only on the orders and `beta`, so they are shared across calls.
struct CoefficientTable {
    m: usize,
    level_start: Vec<usize>,
    coeff: Vec<f64>,
    exps: Vec<u16>,
}

const TABLE_LEVELS: usize = 64;
const TABLE_TERMS: usize = 200_000;
const TABLE_CACHE_LIMIT: usize = 256;

impl CoefficientTable {
    fn build(rho_prime: &[f64], beta: f64) -> Self {
        let m = rho_prime.len();
        let mut table = Self { m, level_start: vec![0], coeff: Vec::new(), exps: Vec::new() };
        for k in 0..TABLE_LEVELS {
            compositions(m, k, &mut |multinomial, counts| {
                let arg = beta + counts.iter().zip(rho_prime).map(|(c, r)| *c as f64 * r).sum::<f64>();
                table.coeff.push(multinomial * rgamma(arg));
                table.exps.extend(counts.iter().map(|&c| c as u16));
            });
            table.level_start.push(table.coeff.len());
            if table.coeff.len() > TABLE_TERMS {
                break;
            }
        }
        table
    }

    fn levels(&self) -> usize {
        self.level_start.len() - 1
    }

    fn level_real(&self, k: usize, powers: &[Vec<f64>]) -> (f64, f64) {
        let (mut sum, mut abs) = (0.0, 0.0);
        for i in self.level_start[k]..self.level_start[k + 1] {
            let mut term = self.coeff[i];
            for (j, p) in powers.iter().enumerate() {
                term *= p[self.exps[i * self.m + j] as usize];
            }
            sum += term;
            abs += term.abs();
        }
        (sum, abs)
    }

    fn level_complex(&self, k: usize, powers: &[Vec<Complex64>]) -> (Complex64, f64) {
        let (mut sum, mut abs) = (Complex64::new(0.0, 0.0), 0.0);
        for i in self.level_start[k]..self.level_start[k + 1] {
            let mut term = Complex64::new(self.coeff[i], 0.0);
            for (j, p) in powers.iter().enumerate() {
                term *= p[self.exps[i * self.m + j] as usize];
            }
            sum += term;
            abs += term.norm();
        }
        (sum, abs)
    }
}

fn coefficient_table(orders: &FractionalOrders, beta: f64) -> Arc<CoefficientTable> {
    type Cache = RwLock<HashMap<(Vec<u64>, u64), Arc<CoefficientTable>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (orders.cache_key(), beta.to_bits());
    if let Some(t) = cache.read().expect("series cache poisoned").get(&key) {
        return t.clone();
    }
    let table = Arc::new(CoefficientTable::build(&orders.rho_prime(), beta));
    let mut cache = cache.write().expect("series cache poisoned");
    if cache.len() >= TABLE_CACHE_LIMIT {
        cache.clear();
    }
    cache.entry(key).or_insert(table).clone()
}

/// Powers `z^0 .. z^{n-1}`.
fn power_table<T: Copy + std::ops::Mul<Output = T>>(z: T, one: T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    let mut p = one;
    for _ in 0..n {
        out.push(p);
        p = p * z;
    }
    out
}

struct LevelTerms<'a> {
    rho_prime: &'a [f64],
    abs: &'a [f64],
    ln_abs: &'a [f64],
    angle: &'a [f64],
    negative: &'a [bool],
    real: bool,
    beta: f64,
}

impl LevelTerms<'_> {
    /// Sum and magnitude sum of all terms of total degree `k`.
    fn level(&self, k: usize) -> (Complex64, f64) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        compositions(self.rho_prime.len(), k, &mut |coeff, counts| {
            self.accumulate(coeff, counts, &mut sum, &mut abs_sum)
        });
        (sum, abs_sum)
    }

    fn accumulate(&self, coeff: f64, counts: &[usize], sum: &mut Complex64, abs_sum: &mut f64) {
        let mut power = 1.0;
        let mut ln_power = 0.0;
        let mut gamma_arg = self.beta;
        let mut angle = 0.0;
        let mut negatives = 0usize;
        for (j, &kj) in counts.iter().enumerate() {
            if kj == 0 {
                continue;
            }
            if self.ln_abs[j] == f64::NEG_INFINITY {
                return;
            }
            let kf = kj as f64;
            power *= self.abs[j].powi(kj as i32);
            ln_power += kf * self.ln_abs[j];
            gamma_arg += kf * self.rho_prime[j];
            if self.real {
                if self.negative[j] {
                    negatives += kj;
                }
            } else {
                angle += kf * self.angle[j];
            }
        }
        let direct = coeff * power;
        let mag = if direct.is_normal() && gamma_arg < 170.0 {
            direct / libm::tgamma(gamma_arg)
        } else {
            (coeff.ln() + ln_power - libm::lgamma_r(gamma_arg).0).exp()
        };
        *abs_sum += mag;
        if self.real {
            let signed = if negatives % 2 == 1 { -mag } else { mag };
            *sum += Complex64::new(signed, 0.0);
        } else {
            *sum += Complex64::from_polar(mag, angle);
        }
    }
}

pub fn ml_series_with(
    orders: &FractionalOrders,
    args: &MlArguments,
    cfg: &SeriesConfig,
) -> Result<MlValue> {
    args.check_len(orders)?;
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("series tolerance must be positive, got {}", cfg.tol)));
    }
    let rho_prime = orders.rho_prime();
    let abs: Vec<f64> = args.z().iter().map(|z| z.norm()).collect();
    let ln_abs: Vec<f64> = abs.iter().map(|a| a.ln()).collect();
    let angle: Vec<f64> = args.z().iter().map(|z| z.arg()).collect();
    let negative: Vec<bool> = args.z().iter().map(|z| z.re < 0.0).collect();
    let terms = LevelTerms {
        rho_prime: &rho_prime,
        abs: &abs,
        ln_abs: &ln_abs,
        angle: &angle,
        negative: &negative,
        real: args.is_real(),
        beta: args.beta(),
    };

    let table = coefficient_table(orders, args.beta());
    let cached = table.levels().min(cfg.max_k + 1);
    let (real_powers, complex_powers) = if args.is_real() {
        let p = args.z().iter().map(|z| power_table(z.re, 1.0, cached)).collect::<Vec<_>>();
        (p, Vec::new())
    } else {
        let one = Complex64::new(1.0, 0.0);
        let p = args.z().iter().map(|z| power_table(*z, one, cached)).collect::<Vec<_>>();
        (Vec::new(), p)
    };

    let mut total = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    let mut previous = f64::INFINITY;
    for k in 0..=cfg.max_k {
        let (level, level_abs) = if k < cached {
            if args.is_real() {
                let (v, a) = table.level_real(k, &real_powers);
                (Complex64::new(v, 0.0), a)
            } else {
                table.level_complex(k, &complex_powers)
            }
        } else {
            terms.level(k)
        };
        if !level_abs.is_finite() {
            return Err(Error::NonConvergence { max_k: k, z1_abs: args.z1().norm() });
        }
        total += level;
        magnitude += level_abs;
        if level_abs < cfg.tol && previous < cfg.tol {
            let rounding = 8.0 * f64::EPSILON * magnitude;
            return Ok(MlValue { value: total, est_error: rounding + level_abs });
        }
        previous = level_abs;
    }
    Err(Error::NonConvergence { max_k: cfg.max_k, z1_abs: args.z1().norm() })
}
