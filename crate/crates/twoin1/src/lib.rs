//! Config ingestion, parallel execution and report writing for the
//! `twoin1` command-line tool.

pub mod commands;
pub mod config;
mod error;
pub mod report;
pub mod runner;

pub use config::{Format, RunConfig};
pub use error::{CliError, Result};
pub use report::{config_hash, Report};
pub use runner::Runner;
