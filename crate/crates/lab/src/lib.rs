//! Experiment runners, configuration and file formats for the partial-wave
//! Dirac solver in `dirac-core`.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod error;
pub mod formats;
pub mod report;
pub mod runner;

pub use config::RunConfig;
pub use error::{LabError, LabResult};
pub use report::ExperimentReport;
pub use runner::{run, Command};
