//! Golden fixtures: a header line `p=<p> w=<w> N=<N>` (`m=` is accepted
//! for composite bases) followed by the digits, optionally split across
//! lines.

use std::fs;
use std::path::{Path, PathBuf};

use blockseq::{PatternSpec, Word};
use thiserror::Error;

/// Overrides the fixture directory.
pub const FIXTURES_ENV: &str = "BLOCKSEQ_FIXTURES";

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_error(line: usize, message: impl Into<String>) -> FixtureError {
    FixtureError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub spec: PatternSpec,
    pub digits: Word,
}

/// `$BLOCKSEQ_FIXTURES` if set, else the fixtures shipped with this crate.
pub fn fixture_dir() -> PathBuf {
    std::env::var_os(FIXTURES_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
}

pub fn load_fixture(path: impl AsRef<Path>) -> Result<Fixture, FixtureError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FixtureError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_fixture(&text)
}

/// Loads `name` from [`fixture_dir`].
pub fn load_named(name: &str) -> Result<Fixture, FixtureError> {
    load_fixture(fixture_dir().join(name))
}

pub fn parse_fixture(text: &str) -> Result<Fixture, FixtureError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_error(1, "missing header"))?;
    let (spec, expected) = parse_header(header)?;

    let mut digits = Vec::with_capacity(expected);
    let mut last_line = 1;
    for (line, body) in lines {
        if body.is_empty() {
            continue;
        }
        last_line = line;
        for (column, c) in body.chars().enumerate() {
            let d = c.to_digit(36).filter(|&d| d < spec.base()).ok_or_else(|| {
                parse_error(line, format!("column {}: invalid digit {c:?}", column + 1))
            })?;
            digits.push(d as u8);
        }
    }
    if digits.is_empty() {
        return Err(parse_error(2, "empty digit body"));
    }
    if digits.len() != expected {
        return Err(parse_error(
            last_line,
            format!(
                "header declares N={expected} but the body has {} digits",
                digits.len()
            ),
        ));
    }
    let digits =
        Word::new(digits, spec.base()).map_err(|e| parse_error(last_line, e.to_string()))?;
    Ok(Fixture { spec, digits })
}

fn parse_header(header: &str) -> Result<(PatternSpec, usize), FixtureError> {
    let (mut base, mut pattern, mut count) = (None, None, None);
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_error(1, format!("expected key=value, got {field:?}")))?;
        match key {
            "p" | "m" => {
                base = Some(
                    value
                        .parse::<u32>()
                        .map_err(|_| parse_error(1, format!("bad base {value:?}")))?,
                )
            }
            "w" => pattern = Some(value),
            "N" => {
                count = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| parse_error(1, format!("bad N {value:?}")))?,
                )
            }
            _ => return Err(parse_error(1, format!("unknown header field {key:?}"))),
        }
    }
    let base = base.ok_or_else(|| parse_error(1, "header lacks p= or m="))?;
    let pattern = pattern.ok_or_else(|| parse_error(1, "header lacks w="))?;
    let count = count.ok_or_else(|| parse_error(1, "header lacks N="))?;
    let spec = PatternSpec::parse(base, pattern).map_err(|e| parse_error(1, e.to_string()))?;
    Ok((spec, count))
}

/// Renders `digits` in fixture format.
pub fn render_fixture(spec: &PatternSpec, digits: &[u8]) -> String {
    let key = if spec.modulus_is_prime() { "p" } else { "m" };
    format!(
        "{key}={} w={} N={}\n{}\n",
        spec.base(),
        spec.pattern(),
        digits.len(),
        blockseq::words::render_digits(digits)
    )
}
