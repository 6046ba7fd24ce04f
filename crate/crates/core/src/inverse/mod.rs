//! Recovery of the spatial source factor `f` in
//! `sum_j q_j D^{rho_j} u + A(D) u = f(x) g(t)` from `u(., 0) = phi` and
//! `u(., t0) = Psi`, one Fourier mode at a time.

mod assemble;
mod mode;
mod probe;

pub use assemble::{
    assemble, factor_table, forward_fields, Diagnostics, FreeCoefficientPolicy, FreeValue, InverseProblem,
    InverseSettings, ModeClassification, ModeRecord, ModeStatus, ReconstructionResult, SmoothnessPolicy,
    SobolevCheck, TimeSlice,
};
pub use mode::{
    check_compatibility, compatibility_tolerance, reconstruct_mode, DegenerateMarker, ModeFactors, ModeOutcome,
};
pub use probe::{bisect_cosine_degeneracy, uniqueness_probe, ProbeTolerances, UniquenessReport, UniquenessVerdict};
