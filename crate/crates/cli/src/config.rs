use std::fmt;
use std::path::PathBuf;

use blockseq::structure::default_scan_length;
use blockseq::{PatternSpec, WordError};
use thiserror::Error;

/// Terms classified by `blocks` when `--count` is absent.
pub const DEFAULT_BLOCK_TERMS: usize = 100_000;
/// Series order used by `series` when neither `--order` nor `--count` is given.
pub const DEFAULT_SERIES_ORDER: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Generate,
    Verify,
    Blocks,
    Powers,
    Series,
    Bench,
}

impl Command {
    fn needs_prime(self) -> bool {
        matches!(self, Command::Blocks | Command::Powers | Command::Series)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Generate => "generate",
            Command::Verify => "verify",
            Command::Blocks => "blocks",
            Command::Powers => "powers",
            Command::Series => "series",
            Command::Bench => "bench",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Plain,
    Table,
    /// `n a(n)` per line.
    Bfile,
    /// Structured `key=value` records.
    Report,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error(transparent)]
    Pattern(#[from] WordError),
    #[error("--count must be at least 1")]
    ZeroCount,
    #[error("{what} must be at least 1")]
    ZeroLength { what: &'static str },
    #[error("{command} requires a prime base, got m={base}")]
    CompositeBase { command: Command, base: u32 },
    #[error("{command} requires --count")]
    MissingCount { command: Command },
    #[error("--format bfile is only available for generate")]
    UnsupportedFormat,
}

/// A validated invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub spec: PatternSpec,
    /// Number of terms; for `powers` and `series` it doubles as the scan
    /// length and series order unless those are given explicitly.
    pub count: usize,
    pub format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub scan_length: usize,
    pub order: usize,
}

impl RunConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        command: Command,
        base: u32,
        pattern: &str,
        count: Option<usize>,
        format: OutputFormat,
        output_path: Option<PathBuf>,
        seed: u64,
        scan_length: Option<usize>,
        order: Option<usize>,
    ) -> Result<Self, ConfigError> {
        let spec = PatternSpec::parse(base, pattern)?;
        if command.needs_prime() && !spec.modulus_is_prime() {
            return Err(ConfigError::CompositeBase { command, base });
        }
        if format == OutputFormat::Bfile && command != Command::Generate {
            return Err(ConfigError::UnsupportedFormat);
        }
        let count = match (count, command) {
            (Some(0), _) => return Err(ConfigError::ZeroCount),
            (Some(n), _) => n,
            (None, Command::Blocks) => DEFAULT_BLOCK_TERMS,
            (None, Command::Powers) => default_scan_length(base),
            (None, Command::Series) => DEFAULT_SERIES_ORDER,
            (None, command) => return Err(ConfigError::MissingCount { command }),
        };
        let scan_length = scan_length.unwrap_or(count);
        let order = order.unwrap_or(count);
        if scan_length == 0 {
            return Err(ConfigError::ZeroLength {
                what: "--scan-length",
            });
        }
        if order == 0 {
            return Err(ConfigError::ZeroLength { what: "--order" });
        }
        Ok(Self {
            command,
            spec,
            count,
            format,
            output_path,
            seed,
            scan_length,
            order,
        })
    }
}
