use thiserror::Error;

use crate::structure::ClaimReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("invalid base {0}: expected 2 <= m <= 36")]
    InvalidBase(u32),
    #[error("digit {digit} at position {position} is not below base {base}")]
    DigitOutOfRange {
        digit: u32,
        position: usize,
        base: u32,
    },
    #[error("invalid digit character {character:?} at position {position}")]
    InvalidCharacter { character: char, position: usize },
    #[error("pattern word must be non-empty")]
    EmptyPattern,
    #[error("word is over base {found}, expected base {expected}")]
    BaseMismatch { expected: u32, found: u32 },
    #[error("value does not fit in 64 bits")]
    Overflow,
    #[error("cannot parse {0:?}, expected <base>:<pattern>")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error(
        "word length {len} is not a positive multiple of the window denominator {denominator}"
    )]
    Misaligned { len: usize, denominator: u64 },
    #[error("{operation} does not apply to {pattern}: it is {kind}")]
    WrongVariant {
        operation: &'static str,
        pattern: String,
        kind: &'static str,
    },
    #[error("initial block m^|w| for {0} does not fit in memory")]
    BlockTooLarge(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("base {0} is not prime")]
    CompositeBase(u32),
    #[error("kernel closure exceeded {limit} elements (fingerprint length {fingerprint_len})")]
    KernelOverflow {
        limit: usize,
        fingerprint_len: usize,
    },
    #[error("kernel index p^{exponent} * {terms} exceeds 64 bits")]
    IndexOverflow { exponent: u32, terms: usize },
    #[error("kernel elements identified at fingerprint length {len} differ at length {doubled}")]
    UnsoundIdentification { len: usize, doubled: usize },
    #[error("reversed automaton exceeded {0} states")]
    TooManyStates(usize),
    #[error("invalid morphism: {0}")]
    Invalid(String),
    #[error("digit {digit} is not a valid letter for the pure morphism over base {base}")]
    InvalidLetter { digit: u8, base: u32 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("base {0} is not prime")]
    CompositeBase(u32),
    #[error("prefix of length {len} does not cover block {block}")]
    PrefixTooShort { block: u64, len: usize },
    #[error("block {block} {detail}")]
    BlockViolation { block: u64, detail: String },
    #[error("claim {} failed: {} violating length(s)", .0.claim, .0.violations.len())]
    ClaimViolation(Box<ClaimReport>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("base {0} is not prime")]
    CompositeBase(u32),
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("generated coefficient {index} is {generated}, oracle says {oracle}")]
    OracleMismatch {
        index: u64,
        generated: u8,
        oracle: u8,
    },
}
