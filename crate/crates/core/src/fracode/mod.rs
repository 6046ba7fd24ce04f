//! One spectral mode of the multi-term Caputo equation
//!
//! ```text
//! sum_j q_j D^{rho_j} T(t) + lambda T(t) = f g(t),   T(0) = phi,
//! ```
//!
//! solved in closed form as
//! `T(t) = phi [1 - lambda t^{rho_1} E_{rho',rho_1+1}(..)] + f b(t)` with the
//! convolution `b(t) = int_0^t g(t - xi) xi^{rho_1 - 1} E_{rho',rho_1}(..) dxi`.

mod caputo;
mod mode;
mod profile;

pub use caputo::{caputo_l1_residual, l1_derivative, ResidualReport};
pub use mode::{
    b_coefficient, b_coefficient_report, mode_homogeneous, mode_solve, mode_value, BReport,
    ModeSolution, Settings,
};
pub use profile::{GProfile, ProfileKind, SourceTimeProfile, CLASSIFY_SAMPLES, SIGN_FLOOR};
