//! Command-line driver for the tdde solver.

pub mod config;
pub mod error;
pub mod run;

pub use config::{RunConfig, SweepSpec};
pub use error::CliError;
pub mod scale;
pub mod sweep;
pub mod validate;
