//! Command-line front end for the double-Λ four-wave-mixing solvers:
//! configuration, single runs, sweeps, figure datasets and validation.

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod run;
pub mod sweep;
pub mod validate;

pub use config::{load_run_config, Format, RunConfig, Solver};
pub use error::{CliError, CliResult};
