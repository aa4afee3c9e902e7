//! Experiment orchestration: configuration files, bias sweeps with stable
//! CSV output, scaling-exponent fits, and the verify-claims check suite.

pub mod config;
pub mod sweep;
pub mod verify;

pub use config::{DistinguisherKind, ExperimentConfig, PartialConfig};
pub use sweep::{
    find_threshold_budget, fit_exponent, points_from_csv, rows_to_csv, run_point, run_single,
    run_sweep, write_csv, SweepRow, CSV_HEADER,
};
pub use verify::{verify_claims, ClaimCheck, ClaimsReport};
