//! File formats, configuration and subcommands of the `nsfp` tool.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::RunConfig;
pub use error::AppError;
