//! Stability experiments: scenario files, solved scatterer pairs, parameter
//! sweeps over perturbed cubes, descriptive fits and convergence studies.

pub mod config;
pub mod records;
pub mod runner;
pub mod validation;

pub use config::{Family, ScattererSpec, ScenarioConfig, CONFIG_KEYS};
pub use records::{
    append_records_csv, eta_of, fit_stability_curve, records_csv, spearman, StabilityFit, StabilityRecord,
    RECORD_CSV_HEADER, SCHEMA_VERSION,
};
pub use runner::{
    compare, default_convergence_params, discretization_floor, far_field_error, near_field_error, run_convergence_study,
    run_pair, run_sweep, solve_scatterer, ConvergenceReport, NearFieldErrors, SolvedScatterer, SweepReport,
};
pub use validation::mie_validation_error;
