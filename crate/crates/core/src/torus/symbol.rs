use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{check_dim, lattice};

/// One term `a_alpha (i n)^alpha` of a homogeneous symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolTerm {
    pub alpha: Vec<u32>,
    pub coeff: f64,
}

/// Constant-coefficient operator `A(D) = sum_{|alpha| = m} a_alpha D^alpha`
/// on `T^N`, acting on `e^{i n.x}` by multiplication with
/// `A(n) = sum a_alpha (i n)^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSymbol", into = "RawSymbol")]
pub struct EllipticSymbol {
    dim: usize,
    order: u32,
    terms: Vec<SymbolTerm>,
}

#[derive(Serialize, Deserialize)]
struct RawSymbol {
    dim: usize,
    order: u32,
    terms: Vec<SymbolTerm>,
}

impl TryFrom<RawSymbol> for EllipticSymbol {
    type Error = Error;
    fn try_from(raw: RawSymbol) -> Result<Self> {
        Self::new(raw.dim, raw.order, raw.terms)
    }
}

impl From<EllipticSymbol> for RawSymbol {
    fn from(s: EllipticSymbol) -> Self {
        Self { dim: s.dim, order: s.order, terms: s.terms }
    }
}

impl EllipticSymbol {
    pub fn new(dim: usize, order: u32, terms: Vec<SymbolTerm>) -> Result<Self> {
        check_dim(dim)?;
        if order == 0 || order % 2 != 0 {
            return Err(Error::InvalidArgument(format!("symbol order must be even and positive, got {order}")));
        }
        if terms.is_empty() {
            return Err(Error::InvalidArgument("symbol has no terms".into()));
        }
        for t in &terms {
            if t.alpha.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "multi-index {:?} in dimension {dim}",
                    t.alpha
                )));
            }
            if t.alpha.iter().sum::<u32>() != order {
                return Err(Error::InvalidArgument(format!(
                    "multi-index {:?} is not of order {order}",
                    t.alpha
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient {} is not finite", t.coeff)));
            }
        }
        Ok(Self { dim, order, terms })
    }

    /// `-Delta`, symbol `|n|^2`.
    pub fn laplacian(dim: usize) -> Result<Self> {
        let terms = (0..dim)
            .map(|k| {
                let mut alpha = vec![0; dim];
                alpha[k] = 2;
                SymbolTerm { alpha, coeff: -1.0 }
            })
            .collect();
        Self::new(dim, 2, terms)
    }

    /// `Delta^2`, symbol `|n|^4`.
    pub fn bilaplacian(dim: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for j in 0..dim {
            for k in 0..dim {
                let mut alpha = vec![0; dim];
                alpha[j] += 2;
                alpha[k] += 2;
                terms.push(SymbolTerm { alpha, coeff: 1.0 });
            }
        }
        Self::new(dim, 4, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &[SymbolTerm] {
        &self.terms
    }

    /// `A(n)`. With `|alpha| = m` even, `i^alpha = (-1)^{m/2}` for every term
    /// so the symbol is real by construction.
    pub fn eval(&self, n: &[i64]) -> Result<f64> {
        if n.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("frequency {n:?} in dimension {}", self.dim)));
        }
        let sign = if (self.order / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut value = 0.0;
        let mut scale = 0.0;
        for t in &self.terms {
            let mono: f64 = t.alpha.iter().zip(n).map(|(&a, &k)| (k as f64).powi(a as i32)).product();
            value += t.coeff * mono;
            scale += (t.coeff * mono).abs();
        }
        let value = sign * value;
        if value < -64.0 * f64::EPSILON * scale {
            return Err(Error::SymbolNotNonnegative { n: n.to_vec(), value });
        }
        Ok(value.max(0.0))
    }

    /// Largest `c` with `A(n) >= c |n|^m` over the nonzero lattice points of
    /// `[-cutoff, cutoff]^N`.
    pub fn ellipticity_constant(&self, cutoff: usize) -> Result<f64> {
        let mut c = f64::INFINITY;
        for n in lattice(self.dim, cutoff) {
            let r2: i64 = n.iter().map(|k| k * k).sum();
            if r2 == 0 {
                continue;
            }
            let a = self.eval(&n)?;
            c = c.min(a / (r2 as f64).powf(self.order as f64 / 2.0));
        }
        if !(c > 0.0) {
            return Err(Error::InvalidArgument(format!("symbol is not elliptic on the sampled lattice (c = {c})")));
        }
        Ok(c)
    }

    /// Tightest `(c1, c2)` with
    /// `c1 (1+|n|^2)^{tau m} <= 1 + A(n)^{2 tau} <= c2 (1+|n|^2)^{tau m}`
    /// over `[-cutoff, cutoff]^N`.
    pub fn equivalence_constants(&self, tau: f64, cutoff: usize) -> Result<(f64, f64)> {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for n in lattice(self.dim, cutoff) {
            let r2: i64 = n.iter().map(|k| k * k).sum();
            let a = self.eval(&n)?;
            let ratio = (1.0 + a.powf(2.0 * tau)) / (1.0 + r2 as f64).powf(tau * self.order as f64);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        Ok((lo, hi))
    }
}
