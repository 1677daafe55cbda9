//! IO companion to `teachdim-core`: JSON wire formats, grid sweeps, and the
//! `teachdim` command-line tool.

pub mod cli;
pub mod error;
pub mod json;
pub mod tables;

pub use error::CliError;
