//! Experiment driver: configuration, the universality and subcritical sweeps,
//! the identity suite and CSV/SVG output.

mod config;
mod identities;
mod output;
mod sweep;

pub use config::{ExperimentConfig, GridSpec, PotentialSource, ScalingRegime, DESK_MAX_N};
pub use identities::{ansatz_stability, hermite_residual, run_identity_suite, spread, IdentityOptions, IdentityRow};
pub use output::{
    emit_outputs, identities_to_csv, numeric_csv, sweep_to_csv, svg_error_curve, svg_heatmap, svg_profiles, write_text, OutputFiles,
    Tables,
};
pub use sweep::{
    couple, run_subcritical_sweep, run_universality_sweep, Prefactor, PrefactorFit, SubcriticalSummary, SweepRow,
    UniversalitySummary,
};
