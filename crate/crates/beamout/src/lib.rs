//! Command-line front end for the outage analysis in `beamout-core`:
//! scenario config files, unit handling, and the `point`, `sweep` and
//! `optimize` reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod units;

pub use commands::{cmd_optimize, cmd_point, cmd_sweep};
pub use config::ScenarioConfig;
pub use error::CliError;
