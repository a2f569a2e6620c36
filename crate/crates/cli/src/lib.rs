//! Command-line plumbing for `blockseq`: configuration, fixtures, the
//! benchmark harness and the subcommand runner.

pub mod bench;
pub mod config;
pub mod fixtures;
pub mod run;

pub use config::{Command, ConfigError, OutputFormat, RunConfig};
pub use run::{run, CliError, Outcome, Status};
