//! Configuration, seeded ensembles and output rendering behind the `inacc`
//! command-line tool.

pub mod commands;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod output;
pub mod svg;

pub use error::{CliError, CliResult};
