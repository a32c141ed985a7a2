//! Command-line front end for qsteer: configuration, subcommands and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod fit;

pub use app::{execute, Cli};
pub use config::{parse as parse_config, Overrides, RunConfig};
pub use error::CliError;
