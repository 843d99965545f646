//! Std companion of `heavenly-core`: run configuration, verification
//! suites, reports and the command implementations behind the CLI.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, ConfigFile, Format, RunConfig};
pub use report::{emit, Report, Status, SuiteResult};
pub use suites::{run, SUITES};
