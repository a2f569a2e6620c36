//! Base-m digit words, occurrence counting and the brute-force oracle.
//!
//! Words are stored most-significant digit first, so `to_base(6, 2)` is
//! `110`. The canonical expansion of `0` is the one-digit word `0`, never
//! the empty word; `e_{2;0}(0) = 1` depends on it.

use std::fmt;
use std::str::FromStr;

use crate::error::WordError;

/// Largest supported base. Digits are rendered as `0-9a-z`.
pub const MAX_BASE: u32 = 36;

/// Longest expansion of a `u64` (base 2).
const MAX_EXPANSION: usize = 64;

pub(crate) fn check_base(base: u32) -> Result<(), WordError> {
    if (2..=MAX_BASE).contains(&base) {
        Ok(())
    } else {
        Err(WordError::InvalidBase(base))
    }
}

/// A finite word over the digit alphabet `{0, .., m-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    base: u32,
    digits: Vec<u8>,
}

impl Word {
    pub fn new(digits: Vec<u8>, base: u32) -> Result<Self, WordError> {
        check_base(base)?;
        if let Some((position, &digit)) = digits
            .iter()
            .enumerate()
            .find(|(_, &d)| u32::from(d) >= base)
        {
            return Err(WordError::DigitOutOfRange {
                digit: u32::from(digit),
                position,
                base,
            });
        }
        Ok(Self { base, digits })
    }

    /// The empty word over base `m`.
    pub fn empty(base: u32) -> Result<Self, WordError> {
        Self::new(Vec::new(), base)
    }

    /// Parses a digit string such as `"0110"`. Digits above 9 use `a-z`.
    pub fn parse(text: &str, base: u32) -> Result<Self, WordError> {
        check_base(base)?;
        let digits = text
            .chars()
            .enumerate()
            .map(|(position, c)| match c.to_digit(36) {
                Some(d) if d < base => Ok(d as u8),
                Some(d) => Err(WordError::DigitOutOfRange {
                    digit: d,
                    position,
                    base,
                }),
                None => Err(WordError::InvalidCharacter {
                    character: c,
                    position,
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { base, digits })
    }

    /// Wraps digits that are already known to be below `base`.
    pub(crate) fn from_trusted(digits: Vec<u8>, base: u32) -> Self {
        debug_assert!(digits.iter().all(|&d| u32::from(d) < base));
        Self { base, digits }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `(w)_m`, the value of the word read in base m. Leading zeros are
    /// accepted.
    pub fn value(&self) -> Result<u64, WordError> {
        from_base(self)
    }

    /// The word with its first letter removed (`w'`).
    pub fn tail(&self) -> Word {
        Self::from_trusted(self.digits.get(1..).unwrap_or_default().to_vec(), self.base)
    }

    /// The word with its last letter removed (`w^⋄`).
    pub fn without_last(&self) -> Word {
        let end = self.digits.len().saturating_sub(1);
        Self::from_trusted(self.digits[..end].to_vec(), self.base)
    }

    pub fn is_suffix_of(&self, other: &[u8]) -> bool {
        other.ends_with(&self.digits)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            write!(f, "{}", digit_char(d))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({}; base {})", self, self.base)
    }
}

/// Renders a single digit (`0-9`, then `a-z`).
pub fn digit_char(d: u8) -> char {
    char::from_digit(u32::from(d), MAX_BASE).unwrap_or('?')
}

/// Renders a digit sequence as a comma-free string.
pub fn render_digits(digits: &[u8]) -> String {
    digits.iter().map(|&d| digit_char(d)).collect()
}

/// Writes `[n]_m` into `buf` and returns the used tail, most significant
/// digit first. Allocation-free; the oracle hot path uses this.
fn expand_into(mut n: u64, base: u32, buf: &mut [u8; MAX_EXPANSION]) -> &[u8] {
    let base = u64::from(base);
    let mut start = MAX_EXPANSION;
    loop {
        start -= 1;
        buf[start] = (n % base) as u8;
        n /= base;
        if n == 0 {
            break;
        }
    }
    &buf[start..]
}

/// `[n]_m`: canonical base-m expansion, no leading zeros, `0 -> "0"`.
pub fn to_base(n: u64, base: u32) -> Result<Word, WordError> {
    check_base(base)?;
    let mut buf = [0u8; MAX_EXPANSION];
    Ok(Word::from_trusted(
        expand_into(n, base, &mut buf).to_vec(),
        base,
    ))
}

/// `(v)_m = Σ v[i] m^(|v|-1-i)`.
pub fn from_base(word: &Word) -> Result<u64, WordError> {
    let base = u64::from(word.base);
    word.digits.iter().try_fold(0u64, |acc, &d| {
        acc.checked_mul(base)
            .and_then(|v| v.checked_add(u64::from(d)))
            .ok_or(WordError::Overflow)
    })
}

/// Number of (possibly overlapping) occurrences of `pattern` in `text`.
pub fn count_occurrences(text: &[u8], pattern: &[u8]) -> usize {
    if pattern.is_empty() || pattern.len() > text.len() {
        return 0;
    }
    text.windows(pattern.len())
        .filter(|w| *w == pattern)
        .count()
}

/// `w^+`: every digit incremented mod m.
pub fn word_plus(word: &Word) -> Word {
    let base = word.base;
    let digits = word
        .digits
        .iter()
        .map(|&d| ((u32::from(d) + 1) % base) as u8)
        .collect();
    Word::from_trusted(digits, base)
}

pub(crate) fn is_prime(m: u32) -> bool {
    m >= 2
        && (2..)
            .take_while(|d| d * d <= m)
            .all(|d| !m.is_multiple_of(d))
}

/// A base together with a non-empty pattern word. This is the parameter
/// object for every generator and checker in the crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PatternSpec {
    base: u32,
    pattern: Word,
    modulus_is_prime: bool,
}

impl PatternSpec {
    pub fn new(base: u32, pattern: Word) -> Result<Self, WordError> {
        check_base(base)?;
        if pattern.base != base {
            return Err(WordError::BaseMismatch {
                expected: base,
                found: pattern.base,
            });
        }
        if pattern.is_empty() {
            return Err(WordError::EmptyPattern);
        }
        Ok(Self {
            base,
            pattern,
            modulus_is_prime: is_prime(base),
        })
    }

    /// Builds a spec from a digit string, e.g. `PatternSpec::parse(2, "11")`.
    pub fn parse(base: u32, pattern: &str) -> Result<Self, WordError> {
        Self::new(base, Word::parse(pattern, base)?)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn pattern(&self) -> &Word {
        &self.pattern
    }

    pub fn modulus_is_prime(&self) -> bool {
        self.modulus_is_prime
    }

    pub fn pattern_len(&self) -> usize {
        self.pattern.len()
    }

    pub fn first_digit(&self) -> u8 {
        self.pattern.digits[0]
    }

    pub fn last_digit(&self) -> u8 {
        self.pattern.digits[self.pattern.len() - 1]
    }

    /// True for 0-words, i.e. patterns whose first letter is 0.
    pub fn is_zero_word(&self) -> bool {
        self.first_digit() == 0
    }

    /// True when the pattern is the single letter `0`.
    pub fn is_single_zero(&self) -> bool {
        self.pattern.digits == [0]
    }

    /// `(w)_m`. Panics if it does not fit in a `u64`; it always fits when
    /// [`block_len`](Self::block_len) does.
    pub fn pattern_value(&self) -> u64 {
        from_base(&self.pattern).expect("pattern value overflows u64")
    }

    /// `m^|w|`, or `None` if it does not fit in a `u64`.
    pub fn block_len(&self) -> Option<u64> {
        u64::from(self.base).checked_pow(self.pattern.len() as u32)
    }

    /// `e_{m;w}(n)`: occurrences of w in `[n]_m`, unreduced.
    pub fn e_count(&self, n: u64) -> u64 {
        let mut buf = [0u8; MAX_EXPANSION];
        let expansion = expand_into(n, self.base, &mut buf);
        count_occurrences(expansion, &self.pattern.digits) as u64
    }

    /// `a_{m;w}(n) = e_{m;w}(n) mod m`.
    pub fn a_value(&self, n: u64) -> u8 {
        (self.e_count(n) % u64::from(self.base)) as u8
    }

    /// The first `n_terms` values of the sequence, one oracle call per term.
    pub fn oracle_prefix(&self, n_terms: usize) -> Vec<u8> {
        (0..n_terms as u64).map(|n| self.a_value(n)).collect()
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} w={}", self.base, self.pattern)
    }
}

impl fmt::Debug for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PatternSpec({self})")
    }
}

impl FromStr for PatternSpec {
    type Err = WordError;

    /// Parses `"<base>:<pattern>"`, e.g. `"2:11"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (base, pattern) = s.split_once(':').ok_or(WordError::Syntax(s.to_string()))?;
        let base = base
            .trim()
            .parse()
            .map_err(|_| WordError::Syntax(s.to_string()))?;
        Self::parse(base, pattern.trim())
    }
}
