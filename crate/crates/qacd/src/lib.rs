//! Experiment driver for average-case quantum distances: configuration and
//! calibration files, angle tables, parallel estimators and report output.

pub mod angles;
pub mod calibration;
pub mod commands;
pub mod config;
pub mod error;
pub mod parallel;
pub mod report;
pub mod scenarios;
pub mod verify;

pub use error::{CliError, CliResult};
