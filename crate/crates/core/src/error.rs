use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid fractional orders: {0}")]
    InvalidOrders(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series did not converge within {max_k} levels (|z1| = {z1_abs})")]
    NonConvergence { max_k: usize, z1_abs: f64 },

    #[error("contour violates its admissibility conditions: {0}")]
    ContourViolation(String),

    #[error("quadrature did not converge: change {change:e} exceeds tolerance {tolerance:e}")]
    QuadratureDivergence { change: f64, tolerance: f64 },

    #[error("asymptotic expansion requires beta > 2*rho1 (beta = {beta}, rho1 = {rho1})")]
    HypothesisViolation { beta: f64, rho1: f64 },

    #[error("no evaluation regime applies: {0}")]
    AllRegimesFailed(String),

    #[error("symbol is negative at n = {n:?}: A(n) = {value}")]
    SymbolNotNonnegative { n: Vec<i64>, value: f64 },

    #[error("grid with {points} points per axis aliases frequencies up to {cutoff}")]
    AliasingRisk { points: usize, cutoff: usize },

    #[error("invalid source time profile: {0}")]
    InvalidProfile(String),

    #[error("data violates the compatibility condition on {} degenerate mode(s)", modes.len())]
    IncompatibleData { modes: Vec<IncompatibleMode> },

    #[error("smoothness hypothesis failed: {0}")]
    SmoothnessViolation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// A degenerate mode whose data cannot be matched by any source coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompatibleMode {
    pub n: Vec<i64>,
    pub residual: f64,
    pub tolerance: f64,
}
