//! File formats, sweeps and the property-verification harness behind the
//! `lqu` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod matrix_file;
pub mod table;
pub mod verify;

pub use error::{exit, CliError, CliResult};
