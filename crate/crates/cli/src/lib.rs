//! Library half of the `cosra` command: configuration parsing, CSV output and
//! the command implementations.

pub mod commands;
pub mod config;
pub mod output;

pub use config::{parse_algorithms, parse_config, parse_range, Manifest, Settings};
