use std::path::PathBuf;
use std::process::ExitCode;

use blockseq_cli::{run, Command, OutputFormat, RunConfig};
use clap::Parser;

/// Block-counting sequences a_{m;w}(n): generation, cross-checks and
/// structural reports.
#[derive(Debug, Parser)]
#[command(name = "blockseq", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Base m.
    #[arg(short = 'm', long)]
    base: u32,
    /// Pattern w as base-m digits (0-9, then a-z).
    #[arg(short = 'w', long)]
    pattern: String,
    /// Number of terms.
    #[arg(short = 'N', long)]
    count: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
    format: OutputFormat,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled spot-checks.
    #[arg(long, default_value_t = blockseq::algebra::DEFAULT_SPOT_CHECK_SEED)]
    seed: u64,
    /// Prefix length scanned by `powers` (defaults to --count).
    #[arg(long)]
    scan_length: Option<usize>,
    /// Series order used by `series` (defaults to --count).
    #[arg(long)]
    order: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = RunConfig::new(
        cli.command,
        cli.base,
        &cli.pattern,
        cli.count,
        cli.format,
        cli.out,
        cli.seed,
        cli.scan_length,
        cli.order,
    )
    .map_err(blockseq_cli::CliError::from)
    .and_then(|config| run(&config));
    match result {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("blockseq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
