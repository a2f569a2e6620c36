//! Throughput comparison of the three generators: one warm-up pass, then
//! the median of [`TIMED_PASSES`] timed passes.

use std::fmt;
use std::time::{Duration, Instant};

use blockseq::morphism::{build_morphism, expand_fixed_point, UniformMorphism};
use blockseq::window::generate;
use blockseq::words::digit_char;
use blockseq::{MorphismError, PatternSpec, WindowError};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const TIMED_PASSES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Oracle,
    Window,
    Morphism,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Oracle => "oracle",
            Generator::Window => "window",
            Generator::Morphism => "morphism",
        })
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub generator: Generator,
    pub spec: PatternSpec,
    pub terms: usize,
    /// Median over the timed passes.
    pub wall_time: Duration,
    /// Terms per second.
    pub throughput: f64,
    /// SHA-256 of the rendered digit string, hex.
    pub checksum: String,
}

impl fmt::Display for BenchRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "generator={} m={} w={} N={} wall_time_ms={:.3} throughput={:.4e} checksum={}",
            self.generator,
            self.spec.base(),
            self.spec.pattern(),
            self.terms,
            self.wall_time.as_secs_f64() * 1e3,
            self.throughput,
            self.checksum
        )
    }
}

pub fn checksum(digits: &[u8]) -> String {
    let rendered: String = digits.iter().map(|&d| digit_char(d)).collect();
    hex::encode(Sha256::digest(rendered.as_bytes()))
}

/// Runs `pass` once untimed and [`TIMED_PASSES`] times timed; returns the
/// median duration and the output of the last pass.
pub fn time_median<F>(mut pass: F) -> Result<(Duration, Vec<u8>), BenchError>
where
    F: FnMut() -> Result<Vec<u8>, BenchError>,
{
    let mut output = pass()?;
    let mut times = Vec::with_capacity(TIMED_PASSES);
    for _ in 0..TIMED_PASSES {
        let start = Instant::now();
        output = pass()?;
        times.push(start.elapsed());
    }
    times.sort();
    Ok((times[TIMED_PASSES / 2], output))
}

fn record(
    generator: Generator,
    spec: &PatternSpec,
    terms: usize,
    timed: (Duration, Vec<u8>),
) -> BenchRecord {
    let (wall_time, output) = timed;
    BenchRecord {
        generator,
        spec: spec.clone(),
        terms,
        wall_time,
        throughput: terms as f64 / wall_time.as_secs_f64().max(1e-9),
        checksum: checksum(&output),
    }
}

pub fn bench_oracle(spec: &PatternSpec, terms: usize) -> Result<BenchRecord, BenchError> {
    let timed = time_median(|| Ok(spec.oracle_prefix(terms)))?;
    Ok(record(Generator::Oracle, spec, terms, timed))
}

pub fn bench_window(spec: &PatternSpec, terms: usize) -> Result<BenchRecord, BenchError> {
    let timed = time_median(|| Ok(generate(spec, terms)?.into_digits()))?;
    Ok(record(Generator::Window, spec, terms, timed))
}

/// Times fixed-point expansion only; the morphism is built beforehand.
pub fn bench_morphism(
    mu: &UniformMorphism,
    spec: &PatternSpec,
    terms: usize,
) -> Result<BenchRecord, BenchError> {
    let timed = time_median(|| Ok(expand_fixed_point(mu, terms)))?;
    Ok(record(Generator::Morphism, spec, terms, timed))
}

/// Benchmarks every generator available for `spec`; the morphism is
/// skipped for composite bases.
pub fn bench_all(spec: &PatternSpec, terms: usize) -> Result<Vec<BenchRecord>, BenchError> {
    let mut records = vec![bench_oracle(spec, terms)?, bench_window(spec, terms)?];
    if spec.modulus_is_prime() {
        let start = Instant::now();
        let mu = build_morphism(spec)?;
        log::info!(
            "built morphism for {spec} ({} letters) in {:?}",
            mu.alphabet_size(),
            start.elapsed()
        );
        records.push(bench_morphism(&mu, spec, terms)?);
    } else {
        log::info!("{spec}: composite base, morphism generator skipped");
    }
    Ok(records)
}

/// True when every record carries the same checksum.
pub fn checksums_agree(records: &[BenchRecord]) -> bool {
    records.windows(2).all(|w| w[0].checksum == w[1].checksum)
}
