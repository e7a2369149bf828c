//! Monte Carlo harness: configuration, trial drivers, statistics and output.

pub mod config;
pub mod ks;
pub mod output;
pub mod pilot;
pub mod runner;
pub mod stats;
pub mod verify;

pub use config::{Command, ExperimentConfig, Format, SCHEMA_VERSION};
pub use ks::{compare_distributions, KsResult};
pub use output::{render, Table, VERSION};
pub use pilot::{run_pilot, Calibration};
pub use runner::{execute, run_analytic, run_btp, run_fpp, run_walks, RunOptions};
pub use stats::{SummaryRow, TrialSummary};
pub use verify::{run_verify, VerifyOptions, VerifyReport};
