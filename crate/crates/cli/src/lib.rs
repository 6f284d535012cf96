//! Command line front end and review server.

pub mod commands;
pub mod config;
pub mod server;

pub use commands::{execute, Cli, ErrorKind, StageError};
