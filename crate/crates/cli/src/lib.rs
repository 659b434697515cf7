//! Command-line front end for `cohgrav-core`: configuration files,
//! subcommands, parallel grid sampling and reproducible CSV/JSON output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, ConfigBuilder, ConfigError, RunConfig};
pub use run::{grid_terms, run, Command, Outcome, RunError};
