//! Command implementations behind the `ep3sense` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod sweep;
pub mod table;

pub use error::{CliError, Result};
