//! Command-line harness around `demc-core`: configs, chain files,
//! diagnostics reports, plot tables and end-to-end reproduction runs.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod plots;
pub mod report;

pub use config::{Algorithm, ExperimentConfig, TargetKind};
pub use error::{HarnessError, Result};
