//! Front end of the `scrap-fwm` binary: config validation, command
//! execution and artifact writing. The binary itself only parses flags into a
//! JSON config and hands it to [`run::run_value`].

pub mod config;
pub mod run;

pub use config::{validate_config, validate_value, Axis, Command, ConfigIssue, RunConfig, SCHEMA_VERSION};
pub use run::{config_hash, run, run_value, CliError, Manifest};
