//! Window transform and the doubling generators.
//!
//! For a pattern `w` over base `m`, the window of a word `v` whose length is
//! a multiple of `m^(|w|-1)` is the index range
//! `[(w')_m * |v| / m^(|w|-1), ((w')_m + 1) * |v| / m^(|w|-1))`. The window
//! transform increments exactly those digits mod m.
//!
//! Two generators build the sequence from the initial block `u_0` (length
//! `m^|w|`, a single 1 at index `(w)_m`):
//!
//! * x-words with `x != 0`: `u_{k+1} = u_k^x φ(u_k) u_k^(m-x-1)` and the
//!   sequence is the limit of `u_k`.
//! * 0-words: `u_{k+1} = φ(u_k) u_k^(m-1)` and the sequence is
//!   `w_{-1} w_0 w_1 ...` with `w_k = u_k^(m-1)`. The leading chunk `w_{-1}`
//!   is `u_0` only for the pattern `0`; every other 0-word starts with
//!   `m^|w|` zeros, because no number below `m^|w|` has an expansion
//!   containing a 0-word of length `|w| >= 2`.

use crate::error::WindowError;
use crate::words::{PatternSpec, Word};

/// Exact rational window bounds `alpha = num / den`, `beta = (num + 1) / den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    alpha_numerator: u64,
    beta_numerator: u64,
    denominator: u64,
    pattern: PatternSpec,
}

impl WindowSpec {
    pub fn new(pattern: &PatternSpec) -> Result<Self, WindowError> {
        let base = u64::from(pattern.base());
        let tail_len = pattern.pattern_len() as u32 - 1;
        let denominator = base
            .checked_pow(tail_len)
            .ok_or_else(|| WindowError::BlockTooLarge(pattern.to_string()))?;
        let alpha_numerator = pattern.pattern().tail().value()?;
        Ok(Self {
            alpha_numerator,
            beta_numerator: alpha_numerator + 1,
            denominator,
            pattern: pattern.clone(),
        })
    }

    pub fn alpha_numerator(&self) -> u64 {
        self.alpha_numerator
    }

    pub fn beta_numerator(&self) -> u64 {
        self.beta_numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn pattern(&self) -> &PatternSpec {
        &self.pattern
    }

    /// The window `[lo, hi)` for a word of length `len`.
    pub fn bounds(&self, len: usize) -> Result<(usize, usize), WindowError> {
        let len64 = len as u64;
        if len == 0 || !len64.is_multiple_of(self.denominator) {
            return Err(WindowError::Misaligned {
                len,
                denominator: self.denominator,
            });
        }
        let width = len64 / self.denominator;
        let lo = self.alpha_numerator * width;
        Ok((lo as usize, (lo + width) as usize))
    }

    /// φ_w applied to `digits`, in place.
    pub fn apply_in_place(&self, digits: &mut [u8]) -> Result<(), WindowError> {
        let (lo, hi) = self.bounds(digits.len())?;
        increment_range(&mut digits[lo..hi], self.pattern.base());
        Ok(())
    }

    /// φ_w(v).
    pub fn phi(&self, v: &Word) -> Result<Word, WindowError> {
        let mut digits = v.digits().to_vec();
        self.apply_in_place(&mut digits)?;
        Ok(Word::from_trusted(digits, v.base()))
    }
}

fn increment_range(digits: &mut [u8], base: u32) {
    let top = (base - 1) as u8;
    for d in digits {
        *d = if *d == top { 0 } else { *d + 1 };
    }
}

/// `u_0`: length `m^|w|`, a single 1 at index `(w)_m`.
pub fn initial_block(spec: &PatternSpec) -> Result<Word, WindowError> {
    let len = initial_block_len(spec)?;
    let mut digits = vec![0u8; len];
    digits[spec.pattern_value() as usize] = 1;
    Ok(Word::from_trusted(digits, spec.base()))
}

fn initial_block_len(spec: &PatternSpec) -> Result<usize, WindowError> {
    spec.block_len()
        .and_then(|len| usize::try_from(len).ok())
        .ok_or_else(|| WindowError::BlockTooLarge(spec.to_string()))
}

fn check_word(spec: &PatternSpec, u: &Word) -> Result<(), WindowError> {
    if u.base() != spec.base() {
        return Err(crate::error::WordError::BaseMismatch {
            expected: spec.base(),
            found: u.base(),
        }
        .into());
    }
    Ok(())
}

/// `u_{k+1} = u_k^x φ_w(u_k) u_k^(m-x-1)` for an x-word, `x != 0`.
pub fn step_nonzero(spec: &PatternSpec, u: &Word) -> Result<Word, WindowError> {
    if spec.is_zero_word() {
        return Err(WindowError::WrongVariant {
            operation: "step_nonzero",
            pattern: spec.to_string(),
            kind: "a 0-word",
        });
    }
    check_word(spec, u)?;
    let window = WindowSpec::new(spec)?;
    let shifted = window.phi(u)?;
    let x = usize::from(spec.first_digit());
    let m = spec.base() as usize;
    let mut out = Vec::with_capacity(u.len() * m);
    for chunk in 0..m {
        let source = if chunk == x { &shifted } else { u };
        out.extend_from_slice(source.digits());
    }
    Ok(Word::from_trusted(out, spec.base()))
}

/// `u_{k+1} = φ_w(u_k) u_k^(m-1)` for a 0-word.
pub fn step_zero(spec: &PatternSpec, u: &Word) -> Result<Word, WindowError> {
    if !spec.is_zero_word() {
        return Err(WindowError::WrongVariant {
            operation: "step_zero",
            pattern: spec.to_string(),
            kind: "a non-0-word",
        });
    }
    check_word(spec, u)?;
    let window = WindowSpec::new(spec)?;
    let mut out = window.phi(u)?.into_digits();
    out.reserve(u.len() * (spec.base() as usize - 1));
    for _ in 1..spec.base() {
        out.extend_from_slice(u.digits());
    }
    Ok(Word::from_trusted(out, spec.base()))
}

/// The first `n_terms` values of `a_{m;w}`.
pub fn generate(spec: &PatternSpec, n_terms: usize) -> Result<Word, WindowError> {
    let digits = if spec.is_zero_word() {
        generate_zero_word(spec, n_terms)?
    } else {
        generate_nonzero_word(spec, n_terms)?
    };
    Ok(Word::from_trusted(digits, spec.base()))
}

/// Copies `buf[src..src + len]` to the end of `buf`, never growing `buf`
/// past `limit`. Returns the number of digits copied.
fn append_copy(buf: &mut Vec<u8>, src: usize, len: usize, limit: usize) -> usize {
    let take = len.min(limit.saturating_sub(buf.len()));
    buf.extend_from_within(src..src + take);
    take
}

/// Increments the part of the window of a length-`len` chunk starting at
/// `chunk_start` that has been materialised.
fn apply_window_clipped(
    window: &WindowSpec,
    buf: &mut [u8],
    chunk_start: usize,
    len: usize,
) -> Result<(), WindowError> {
    let (lo, hi) = window.bounds(len)?;
    let end = buf.len();
    let lo = (chunk_start + lo).min(end);
    let hi = (chunk_start + hi).min(end);
    increment_range(&mut buf[lo..hi], window.pattern().base());
    Ok(())
}

fn generate_nonzero_word(spec: &PatternSpec, n_terms: usize) -> Result<Vec<u8>, WindowError> {
    let fits = spec.block_len().is_some_and(|len| len <= n_terms as u64);
    if !fits {
        // The whole request lies inside u_0.
        let mut out = vec![0u8; n_terms];
        if let Some(t) = spec.pattern().value().ok().filter(|&t| t < n_terms as u64) {
            out[t as usize] = 1;
        }
        return Ok(out);
    }
    let window = WindowSpec::new(spec)?;
    let x = usize::from(spec.first_digit());
    let m = spec.base() as usize;
    let mut buf = Vec::with_capacity(n_terms);
    buf.extend_from_slice(initial_block(spec)?.digits());
    while buf.len() < n_terms {
        let len = buf.len();
        for chunk in 1..m {
            if buf.len() >= n_terms {
                break;
            }
            append_copy(&mut buf, 0, len, n_terms);
            if chunk == x {
                apply_window_clipped(&window, &mut buf, chunk * len, len)?;
            }
        }
    }
    buf.truncate(n_terms);
    Ok(buf)
}

fn generate_zero_word(spec: &PatternSpec, n_terms: usize) -> Result<Vec<u8>, WindowError> {
    let fits = spec.block_len().is_some_and(|len| len <= n_terms as u64);
    if !fits {
        let mut out = vec![0u8; n_terms];
        if spec.is_single_zero() && n_terms > 0 {
            out[0] = 1;
        }
        return Ok(out);
    }
    let window = WindowSpec::new(spec)?;
    let m = spec.base() as usize;
    let block = initial_block(spec)?;
    let mut buf = Vec::with_capacity(n_terms);
    // w_{-1}
    if spec.is_single_zero() {
        buf.extend_from_slice(block.digits());
    } else {
        buf.resize(block.len(), 0);
    }
    // w_0 = u_0^(m-1); u_0 is not yet inside the buffer unless w = 0.
    let mut u_start = buf.len();
    let u_len = block.len();
    for _ in 1..m {
        let take = u_len.min(n_terms.saturating_sub(buf.len()));
        buf.extend_from_slice(&block.digits()[..take]);
    }
    let mut u_len = u_len;
    // Each pass emits w_{k+1} = (φ(u_k) u_k^(m-1))^(m-1) directly after w_k,
    // reading u_k from its first copy inside w_k.
    while buf.len() < n_terms {
        let next_start = buf.len();
        for _ in 1..m {
            let chunk_start = buf.len();
            append_copy(&mut buf, u_start, u_len, n_terms);
            apply_window_clipped(&window, &mut buf, chunk_start, u_len)?;
            for _ in 1..m {
                append_copy(&mut buf, u_start, u_len, n_terms);
            }
            if buf.len() >= n_terms {
                break;
            }
        }
        u_start = next_start;
        u_len *= m;
    }
    buf.truncate(n_terms);
    Ok(buf)
}
