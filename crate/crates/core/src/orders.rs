use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orders `rho_1 > ... > rho_M` and weights `q_j` of the multi-term Caputo
/// operator `sum_j q_j d^{rho_j}/dt^{rho_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOrders", into = "RawOrders")]
pub struct FractionalOrders {
    rho: Vec<f64>,
    q: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawOrders {
    rho: Vec<f64>,
    q: Vec<f64>,
}

impl TryFrom<RawOrders> for FractionalOrders {
    type Error = Error;
    fn try_from(raw: RawOrders) -> Result<Self> {
        FractionalOrders::new(raw.rho, raw.q)
    }
}

impl From<FractionalOrders> for RawOrders {
    fn from(o: FractionalOrders) -> Self {
        RawOrders { rho: o.rho, q: o.q }
    }
}

impl FractionalOrders {
    /// Validates `1 > rho_1 > ... > rho_M > 0`, `q_1 = 1` and `q_j > 0`.
    ///
    /// A single order equal to one is also accepted so that the classical
    /// exponential `E_{1,1}(z) = e^z` can be reached through the same code.
    pub fn new(rho: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::InvalidOrders("at least one order is required".into()));
        }
        if rho.len() != q.len() {
            return Err(Error::InvalidOrders(format!(
                "{} orders but {} weights",
                rho.len(),
                q.len()
            )));
        }
        let upper_ok = |r: f64| r < 1.0 || (rho.len() == 1 && r == 1.0);
        if rho.iter().any(|&r| !(r > 0.0 && upper_ok(r)) || !r.is_finite()) {
            return Err(Error::InvalidOrders(format!("orders must lie in (0,1): {rho:?}")));
        }
        if rho.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidOrders(format!(
                "orders must be strictly decreasing: {rho:?}"
            )));
        }
        if q[0] != 1.0 {
            return Err(Error::InvalidOrders(format!("q_1 must equal 1, got {}", q[0])));
        }
        if q.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidOrders(format!("weights must be positive: {q:?}")));
        }
        Ok(Self { rho, q })
    }

    /// Single-term operator of order `rho`, `rho` in `(0, 1]`.
    pub fn single(rho: f64) -> Result<Self> {
        Self::new(vec![rho], vec![1.0])
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Leading (largest) order `rho_1`.
    pub fn leading(&self) -> f64 {
        self.rho[0]
    }

    /// `(rho_1, rho_1 - rho_2, ..., rho_1 - rho_M)`.
    pub fn rho_prime(&self) -> Vec<f64> {
        let r1 = self.rho[0];
        std::iter::once(r1)
            .chain(self.rho[1..].iter().map(|r| r1 - r))
            .collect()
    }

    /// The secondary arguments `z_j = -q_j t^{rho_1 - rho_j}`, `j >= 2`.
    pub fn secondary_args(&self, t: f64) -> Vec<f64> {
        let r1 = self.rho[0];
        self.rho[1..]
            .iter()
            .zip(&self.q[1..])
            .map(|(r, q)| -q * t.powf(r1 - r))
            .collect()
    }

    /// Stable key for caches.
    pub(crate) fn cache_key(&self) -> Vec<u64> {
        self.rho.iter().chain(&self.q).map(|v| v.to_bits()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_orders() {
        assert!(FractionalOrders::new(vec![0.3, 0.8], vec![1.0, 1.0]).is_err());
        assert!(FractionalOrders::new(vec![0.8, 0.8], vec![1.0, 1.0]).is_err());
        assert!(FractionalOrders::new(vec![1.0, 0.5], vec![1.0, 1.0]).is_err());
        assert!(FractionalOrders::new(vec![0.8, 0.3], vec![2.0, 1.0]).is_err());
        assert!(FractionalOrders::new(vec![0.8, 0.3], vec![1.0, -1.0]).is_err());
        assert!(FractionalOrders::new(vec![0.8], vec![1.0, 1.0]).is_err());
        assert!(FractionalOrders::new(vec![], vec![]).is_err());
        assert!(FractionalOrders::single(1.0).is_ok());
        assert!(FractionalOrders::single(1.2).is_err());
    }

    #[test]
    fn rho_prime_and_secondary_args() {
        let o = FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5]).unwrap();
        let rp = o.rho_prime();
        assert_eq!(rp[0], 0.8);
        assert!((rp[1] - 0.5).abs() < 1e-15);
        let z = o.secondary_args(4.0);
        assert!((z[0] + 0.5 * 2.0).abs() < 1e-14);
    }
}
