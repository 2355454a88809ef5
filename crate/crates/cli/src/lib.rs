//! Configuration parsing and subcommand execution behind the `muxepi`
//! binary.

pub mod config;
pub mod run;

pub use config::{parse_config, Command, ConfigError, Overrides, RunConfig, SEED_ENV};
pub use run::{run, Manifest, RunError, Status, MANIFEST};
