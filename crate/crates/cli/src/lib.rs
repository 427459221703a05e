//! Configuration parsing and command implementations behind the
//! `photonctx` binary.

pub mod commands;
pub mod config;

pub use commands::{execute, exit, CliError};
pub use config::{parse_config, parse_override, Command, ConfigError, Format, RunConfig};
