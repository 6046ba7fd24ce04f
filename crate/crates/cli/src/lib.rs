//! Configuration, file formats and subcommand drivers behind the `tfsource`
//! binary.

pub mod checks;
pub mod commands;
pub mod config;
pub mod io;
pub mod stats;

pub use config::{Overrides, ProblemConfig, SCHEMA};
