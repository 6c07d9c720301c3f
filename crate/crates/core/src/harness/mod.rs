//! Configuration, persistence, oracle comparison and convergence studies.
//! This is the only part of the crate that touches the filesystem.

pub mod compare;
pub mod config;
pub mod convergence;
pub mod io;
pub mod run;

pub use compare::{compare, ComparisonReport, ComparisonRow};
pub use config::{load_config, parse_config, ConfigError, Mode, RunConfig};
pub use convergence::{convergence_study, ConvergenceTable, Rung};
pub use run::{run, RunError, RunOutcome};
