//! Command-line front end for `mosoo-core`: runs the optimizers, computes
//! indicators and bound curves, and exports everything as CSV and JSON.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;

pub use config::{Algorithm, BoundsConfig, RunConfig};
pub use error::{CliError, CliResult};
