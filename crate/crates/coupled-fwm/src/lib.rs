//! Scenario configs, artifact formats and subcommands for `coupled-fwm-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;

pub use commands::{run, Command, RunOptions};
pub use error::CliError;
