//! Command-line driver for the `modgap` emission model: configuration
//! handling, command dispatch and CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod run;

pub use config::{build_config, Command, Overrides, RunConfig};
pub use error::CliError;
pub use run::{execute, write_output, Table};
