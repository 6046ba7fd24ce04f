//! Numerical core for the multi-term time-fractional inverse source problem on
//! the flat torus.
//!
//! The crate is split along the natural layers of the computation:
//!
//! * [`multiml`] evaluates the multinomial Mittag-Leffler function by power
//!   series, by a Hankel-type contour integral and by its large-argument
//!   expansion, with a dispatcher that picks the regime.
//! * [`fracode`] holds the closed-form solution of one spectral mode of the
//!   multi-term Caputo equation, the convolution denominator `b(t)` and an L1
//!   finite-difference residual oracle.
//! * [`torus`] provides constant-coefficient elliptic symbols, grid/Fourier
//!   transforms, Sobolev norms and mode enumeration on `T^N`.
//! * [`inverse`] reconstructs the spatial source factor mode by mode,
//!   classifies degenerate modes and checks solvability.

pub mod error;
pub mod fracode;
pub mod inverse;
pub mod multiml;
pub mod orders;
pub mod quadrature;
pub mod torus;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use orders::FractionalOrders;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
