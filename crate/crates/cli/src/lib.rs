//! Experiment runner for the cognitive radio diversity simulations: presets
//! for the two throughput figures and the diversity-gain bound check, with
//! CSV and JSON output.

pub mod error;
pub mod output;
pub mod run;
pub mod spec;

pub use error::CliError;
pub use output::{read_csv, Bounds, Row};
pub use run::{run_experiment, RunOutcome};
pub use spec::{validate_spec, ExperimentSpec, OutputFormat, Preset, RawFlags, Workers};

/// Exit status when a theorem-suite estimate falls outside its bounds.
pub const EXIT_BOUND_VIOLATION: i32 = 3;
