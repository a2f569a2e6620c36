use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;

use blockseq::algebra::{
    degree_evidence, functional_equation_residual, series_from_sequence_seeded,
};
use blockseq::morphism::{build_morphism, expand_fixed_point};
use blockseq::structure::{classify_all, evaluate_multiple_property, evaluate_power_exclusions};
use blockseq::window::generate;
use blockseq::words::{digit_char, render_digits};
use blockseq::{PatternSpec, StructureError};
use thiserror::Error;

use crate::bench::{bench_all, checksums_agree};
use crate::config::{Command, ConfigError, OutputFormat, RunConfig};
use crate::fixtures::render_fixture;

/// Digits per row in `--format table`.
const TABLE_WIDTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// A cross-check or claim failed; the output says where.
    Failed,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {}: {source}", path.as_ref().map_or("stdout".into(), |p| p.display().to_string()))]
    Io {
        path: Option<PathBuf>,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Computation(String),
}

impl CliError {
    /// 1 failed computation, 2 usage, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Computation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

fn computation(e: impl std::fmt::Display) -> CliError {
    CliError::Computation(e.to_string())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub text: String,
}

impl Outcome {
    fn new(passed: bool, text: String) -> Self {
        let status = if passed {
            Status::Success
        } else {
            Status::Failed
        };
        Self { status, text }
    }
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Failed => 1,
        }
    }
}

/// Executes the command and writes its output to `--out` or stdout.
pub fn run(config: &RunConfig) -> Result<Status, CliError> {
    let outcome = execute(config)?;
    let written = match &config.output_path {
        Some(path) => fs::write(path, &outcome.text),
        None => io::stdout().lock().write_all(outcome.text.as_bytes()),
    };
    written.map_err(|source| CliError::Io {
        path: config.output_path.clone(),
        source,
    })?;
    Ok(outcome.status)
}

/// Executes the command without emitting anything.
pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    log::debug!("{} {} count={}", config.command, config.spec, config.count);
    match config.command {
        Command::Generate => generate_cmd(config),
        Command::Verify => verify_cmd(config),
        Command::Blocks => blocks_cmd(config),
        Command::Powers => powers_cmd(config),
        Command::Series => series_cmd(config),
        Command::Bench => bench_cmd(config),
    }
}

pub fn format_terms(spec: &PatternSpec, digits: &[u8], format: OutputFormat) -> String {
    match format {
        OutputFormat::Plain => format!("{}\n", render_digits(digits)),
        OutputFormat::Table => {
            let mut out = String::new();
            for (row, chunk) in digits.chunks(TABLE_WIDTH).enumerate() {
                let _ = writeln!(out, "{:>12} {}", row * TABLE_WIDTH, render_digits(chunk));
            }
            out
        }
        OutputFormat::Bfile => {
            let mut out = String::with_capacity(digits.len() * 8);
            for (n, d) in digits.iter().enumerate() {
                let _ = writeln!(out, "{n} {d}");
            }
            out
        }
        OutputFormat::Report => render_fixture(spec, digits),
    }
}

fn generate_cmd(config: &RunConfig) -> Result<Outcome, CliError> {
    let word = generate(&config.spec, config.count).map_err(computation)?;
    Ok(Outcome::new(
        true,
        format_terms(&config.spec, word.digits(), config.format),
    ))
}

fn first_disagreement(a: &[u8], b: &[u8]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y)
}

fn verify_cmd(config: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, n) = (&config.spec, config.count);
    let (oracle, window, morphism) = std::thread::scope(|s| {
        let oracle = s.spawn(|| spec.oracle_prefix(n));
        let window = s.spawn(|| generate(spec, n).map(|w| w.into_digits()));
        let morphism = s.spawn(|| {
            spec.modulus_is_prime()
                .then(|| build_morphism(spec).map(|mu| expand_fixed_point(&mu, n)))
                .transpose()
        });
        (
            oracle.join().expect("oracle thread panicked"),
            window.join().expect("window thread panicked"),
            morphism.join().expect("morphism thread panicked"),
        )
    });
    let window = window.map_err(computation)?;
    let morphism = morphism.map_err(computation)?;

    let mut candidates = vec![("window", window)];
    if let Some(m) = morphism {
        candidates.push(("morphism", m));
    }
    let names: Vec<&str> = std::iter::once("oracle")
        .chain(candidates.iter().map(|c| c.0))
        .collect();
    let mut line = format!(
        "verify m={} w={} N={} generators={}",
        spec.base(),
        spec.pattern(),
        n,
        names.join(",")
    );
    let failure = candidates
        .iter()
        .find_map(|(name, digits)| first_disagreement(digits, &oracle).map(|i| (name, digits, i)));
    match failure {
        None => line.push_str(" verdict=PASS\n"),
        Some((name, digits, i)) => {
            let _ = writeln!(
                line,
                " verdict=FAIL first_disagreement={i} {name}={} oracle={}",
                digit_char(digits[i]),
                digit_char(oracle[i])
            );
        }
    }
    Ok(Outcome::new(failure.is_none(), line))
}

fn blocks_cmd(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = &config.spec;
    let prefix = generate(spec, config.count)
        .map_err(computation)?
        .into_digits();
    let head = format!(
        "blocks m={} w={} N={}",
        spec.base(),
        spec.pattern(),
        prefix.len()
    );
    match classify_all(spec, &prefix) {
        Ok(summary) => {
            let shown: Vec<String> = summary
                .canonical_mismatches
                .iter()
                .take(16)
                .map(u64::to_string)
                .collect();
            let text = format!(
                "{head} blocks={} type1={} type2={} violations=0 literal_predicate_mismatches={} first=[{}] verdict=PASS\n",
                summary.blocks,
                summary.type1,
                summary.type2,
                summary.canonical_mismatches.len(),
                shown.join(",")
            );
            Ok(Outcome::new(true, text))
        }
        Err(e @ StructureError::BlockViolation { .. }) => {
            Ok(Outcome::new(false, format!("{head} verdict=FAIL {e}\n")))
        }
        Err(e) => Err(computation(e)),
    }
}

fn powers_cmd(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = &config.spec;
    let mut reports =
        vec![evaluate_multiple_property(spec, config.scan_length).map_err(computation)?];
    reports.extend(evaluate_power_exclusions(spec, config.scan_length).map_err(computation)?);
    let passed = reports.iter().all(|r| r.passed());
    let text = reports.iter().map(|r| format!("{r}\n")).collect();
    Ok(Outcome::new(passed, text))
}

fn series_cmd(config: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, order) = (&config.spec, config.order);
    let mut text = String::new();
    if config.format == OutputFormat::Report {
        log::info!("series spot-check seed {}", config.seed);
        let f = series_from_sequence_seeded(spec, order, config.seed).map_err(computation)?;
        text.push_str(&f.dump(spec));
    }
    let residual = functional_equation_residual(spec, order).map_err(computation)?;
    let first = residual.first_nonzero();
    let _ = write!(
        text,
        "residual p={} w={} N={order}",
        spec.base(),
        spec.pattern()
    );
    match first {
        None => text.push_str(" verdict=PASS\n"),
        Some(j) => {
            let _ = writeln!(text, " verdict=FAIL first_nonzero={j}");
        }
    }
    let evidence = degree_evidence(spec, order).map_err(computation)?;
    let period = evidence
        .period
        .map_or("none".to_string(), |(pre, per)| format!("{per}+{pre}"));
    let corrected = evidence
        .corrected_first_nonzero
        .map_or("PASS".to_string(), |j| format!("FAIL@{j}"));
    let _ = writeln!(
        text,
        "degree p={} w={} N={order} corrected_residual={corrected} period={period} supports_degree_p={} level=evidence",
        spec.base(),
        spec.pattern(),
        evidence.supports_degree_p()
    );
    Ok(Outcome::new(first.is_none(), text))
}

fn bench_cmd(config: &RunConfig) -> Result<Outcome, CliError> {
    let records = bench_all(&config.spec, config.count).map_err(computation)?;
    let agree = checksums_agree(&records);
    let mut text = String::new();
    if config.format == OutputFormat::Table {
        let _ = writeln!(
            text,
            "{:<9} {:>12} {:>14}  checksum",
            "generator", "median_ms", "terms/s"
        );
        for r in &records {
            let _ = writeln!(
                text,
                "{:<9} {:>12.3} {:>14.4e}  {}",
                r.generator.to_string(),
                r.wall_time.as_secs_f64() * 1e3,
                r.throughput,
                r.checksum
            );
        }
    } else {
        for r in &records {
            let _ = writeln!(text, "{r}");
        }
    }
    let _ = writeln!(
        text,
        "checksums={}",
        if agree { "agree" } else { "DISAGREE" }
    );
    Ok(Outcome::new(agree, text))
}
