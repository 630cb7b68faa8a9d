//! Numerical checks of norm equivalences, kernel bounds and dualities.

pub mod band;
pub mod checks;
pub mod family;
pub mod suite;

pub use band::{band_result, one_sided_band, BandConfig, Offender, RatioBandResult};
pub use checks::*;
pub use family::{
    bergman_kernels, geometric_schedule, kernel_atoms, random_polynomials, truncated_atoms, truncated_logs, FamilySpec, TestFamily,
};
pub use suite::{
    acceptance_suite, emit_report, run_experiment, run_suite, Experiment, ExperimentResult, ExperimentSpec, Outcome, Report, Suite, TableSpec,
    ACCEPTANCE,
};
