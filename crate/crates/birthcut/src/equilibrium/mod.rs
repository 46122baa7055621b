//! One-cut equilibrium measures of `V_t = V/t`, effective potentials,
//! critical points and synthesis of birth-of-a-cut potentials.

pub(crate) mod critical;
mod onecut;
mod potential;
mod synth;

pub use critical::{arcsine_log_potential, detect_critical_point, off_support_samples, phi, phi_on, CriticalReport};
pub use onecut::{br_derivative_check, effective_potential, q_identity_check, solve_one_cut, BrRow, OneCutMeasure};
pub use potential::Potential;
pub use synth::{synthesize_birth_potential, MIN_MARGIN};

/// Collar around support endpoints excluded from off-support sampling.
pub const EDGE_COLLAR: f64 = 0.05;
