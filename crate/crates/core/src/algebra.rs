//! Truncated power series over F_p and the functional equation for
//! `f = Σ a_{p;w}(n) t^n`.
//!
//! With `k = |w|` and `M = p^k`, the identity checked here is
//!
//! ```text
//! (1 + t + ... + t^(p-1)) f^p - f = t^([w]_p) / (t^M - 1)        (w[0] != 0)
//!                                 = t^(M + [w]_p) / (t^M - 1)    (w[0] == 0)
//! ```
//!
//! Over F_p, `1 / (t^M - 1) = -(1 + t^M + t^(2M) + ...)`, since
//! `(t^M - 1) * -(Σ t^(jM)) = 1`. So the right-hand side is a train of
//! coefficients `p - 1` at `[w]_p + jM`, starting at `j = 0` or `j = 1`.
//!
//! For `w = 0` the left side also carries `a(0) - a(j) = 1` at `t^j` for
//! `1 <= j < p` (the expansion of `j` has no leading zero, while
//! `a(0) = 1`). [`boundary_correction`] returns that polynomial.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::AlgebraError;
use crate::structure::z_array;
use crate::window::generate;
use crate::words::PatternSpec;

/// Seed for the oracle spot-check in [`series_from_sequence`].
pub const DEFAULT_SPOT_CHECK_SEED: u64 = 0x5eed_b10c;

fn require_prime(spec: &PatternSpec) -> Result<u32, AlgebraError> {
    if spec.modulus_is_prime() {
        Ok(spec.base())
    } else {
        Err(AlgebraError::CompositeBase(spec.base()))
    }
}

/// A polynomial over F_p in normal form: no trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    modulus: u32,
    coefficients: Vec<u8>,
}

impl FpPoly {
    /// Reduces each coefficient mod p and strips trailing zeros.
    pub fn new(modulus: u32, coefficients: impl IntoIterator<Item = u64>) -> Self {
        let mut coefficients: Vec<u8> = coefficients
            .into_iter()
            .map(|c| (c % u64::from(modulus)) as u8)
            .collect();
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        Self {
            modulus,
            coefficients,
        }
    }

    pub fn zero(modulus: u32) -> Self {
        Self::new(modulus, [])
    }

    /// `c t^exponent`.
    pub fn monomial(modulus: u32, exponent: usize, c: u64) -> Self {
        let mut coefficients = vec![0; exponent + 1];
        coefficients[exponent] = c;
        Self::new(modulus, coefficients)
    }

    /// `1 + t + ... + t^(p-1)`.
    pub fn geometric(modulus: u32) -> Self {
        Self::new(modulus, std::iter::repeat_n(1, modulus as usize))
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn coefficients(&self) -> &[u8] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn coefficient(&self, i: usize) -> u8 {
        self.coefficients.get(i).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &FpPoly) -> Result<FpPoly, AlgebraError> {
        if self.modulus != other.modulus {
            return Err(AlgebraError::ModulusMismatch(self.modulus, other.modulus));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.modulus));
        }
        let mut out = vec![0u64; self.coefficients.len() + other.coefficients.len() - 1];
        for (i, &a) in self.coefficients.iter().enumerate() {
            for (j, &b) in other.coefficients.iter().enumerate() {
                out[i + j] += u64::from(a) * u64::from(b);
            }
        }
        Ok(Self::new(self.modulus, out))
    }
}

/// The first `order` coefficients of a power series over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    modulus: u32,
    coefficients: Vec<u8>,
}

impl TruncatedSeries {
    pub fn new(modulus: u32, coefficients: Vec<u8>) -> Self {
        let p = modulus as u8;
        let coefficients = coefficients.into_iter().map(|c| c % p).collect();
        Self {
            modulus,
            coefficients,
        }
    }

    pub fn zero(modulus: u32, order: usize) -> Self {
        Self::new(modulus, vec![0; order])
    }

    /// The polynomial truncated to `order` terms.
    pub fn from_poly(poly: &FpPoly, order: usize) -> Self {
        let mut coefficients = poly.coefficients.clone();
        coefficients.resize(order, 0);
        Self {
            modulus: poly.modulus,
            coefficients,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[u8] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0)
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.coefficients.iter().position(|&c| c != 0)
    }

    fn check(&self, other: &TruncatedSeries) -> Result<usize, AlgebraError> {
        if self.modulus != other.modulus {
            return Err(AlgebraError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.order().min(other.order()))
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        let order = self.check(other)?;
        let p = self.modulus as u8;
        let coefficients = (0..order)
            .map(|i| (self.coefficients[i] + other.coefficients[i]) % p)
            .collect();
        Ok(Self::new(self.modulus, coefficients))
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        let order = self.check(other)?;
        let p = self.modulus as u8;
        let coefficients = (0..order)
            .map(|i| (self.coefficients[i] + p - other.coefficients[i]) % p)
            .collect();
        Ok(Self::new(self.modulus, coefficients))
    }

    /// Schoolbook product, truncated to the smaller order.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        let order = self.check(other)?;
        let p = u64::from(self.modulus);
        let mut out = vec![0u64; order];
        for (i, &a) in self.coefficients[..order]
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
        {
            for (j, &b) in other.coefficients[..order - i].iter().enumerate() {
                out[i + j] = (out[i + j] + u64::from(a) * u64::from(b)) % p;
            }
        }
        Ok(Self::new(
            self.modulus,
            out.into_iter().map(|c| c as u8).collect(),
        ))
    }

    /// Product with a polynomial, keeping this series' order.
    pub fn mul_poly(&self, poly: &FpPoly) -> Result<TruncatedSeries, AlgebraError> {
        if self.modulus != poly.modulus {
            return Err(AlgebraError::ModulusMismatch(self.modulus, poly.modulus));
        }
        let order = self.order();
        let p = u64::from(self.modulus);
        let mut out = vec![0u64; order];
        for (shift, &c) in poly
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
        {
            for (i, &a) in self
                .coefficients
                .iter()
                .take(order.saturating_sub(shift))
                .enumerate()
            {
                out[i + shift] += u64::from(c) * u64::from(a);
            }
        }
        Ok(Self::new(
            self.modulus,
            out.into_iter().map(|v| (v % p) as u8).collect(),
        ))
    }

    /// Dump format: `p=<p> w=<w> N=<N>` then the coefficients as a digit
    /// string.
    pub fn dump(&self, spec: &PatternSpec) -> String {
        format!(
            "p={} w={} N={}\n{}\n",
            self.modulus,
            spec.pattern(),
            self.order(),
            crate::words::render_digits(&self.coefficients)
        )
    }
}

/// `f` truncated at `order`, generated by the window generator and with a
/// seeded 1% sample re-checked against the oracle.
pub fn series_from_sequence(
    spec: &PatternSpec,
    order: usize,
) -> Result<TruncatedSeries, AlgebraError> {
    series_from_sequence_seeded(spec, order, DEFAULT_SPOT_CHECK_SEED)
}

pub fn series_from_sequence_seeded(
    spec: &PatternSpec,
    order: usize,
    seed: u64,
) -> Result<TruncatedSeries, AlgebraError> {
    let p = require_prime(spec)?;
    let coefficients = generate(spec, order)
        .expect("prime-base spec is within generator range")
        .into_digits();
    if order > 0 {
        let mut rng = StdRng::seed_from_u64(seed);
        let samples = (order / 100).max(1);
        for _ in 0..samples {
            let index = rng.gen_range(0..order) as u64;
            let oracle = spec.a_value(index);
            let generated = coefficients[index as usize];
            if oracle != generated {
                return Err(AlgebraError::OracleMismatch {
                    index,
                    generated,
                    oracle,
                });
            }
        }
    }
    Ok(TruncatedSeries::new(p, coefficients))
}

/// `f^p` via `f(t)^p = f(t^p)`: coefficient `pn` is `f_n`, all others zero.
pub fn frobenius_power(f: &TruncatedSeries) -> TruncatedSeries {
    let p = f.modulus as usize;
    let order = f.order();
    let mut out = vec![0; order];
    for (n, &c) in f.coefficients.iter().enumerate().take(order.div_ceil(p)) {
        out[n * p] = c;
    }
    TruncatedSeries::new(f.modulus, out)
}

/// `t^([w]_p) / (t^(p^k) - 1)` (or `t^(p^k + [w]_p) / ...` for 0-words),
/// expanded as `-Σ t^(jM + [w]_p)` and truncated at `order`.
pub fn rhs_series(spec: &PatternSpec, order: usize) -> Result<TruncatedSeries, AlgebraError> {
    let p = require_prime(spec)?;
    let mut out = vec![0u8; order];
    let Some(period) = spec.block_len() else {
        return Ok(TruncatedSeries::new(p, out));
    };
    let offset = spec.pattern_value();
    let first = if spec.is_zero_word() { 1 } else { 0 };
    let minus_one = (p - 1) as u8;
    let mut exponent = period
        .checked_mul(first)
        .and_then(|e| e.checked_add(offset));
    while let Some(e) = exponent.filter(|&e| e < order as u64) {
        out[e as usize] = minus_one;
        exponent = e.checked_add(period);
    }
    Ok(TruncatedSeries::new(p, out))
}

/// The correction that makes the functional equation exact at the origin:
/// `t + ... + t^(p-1)` for `w = 0`, zero otherwise.
pub fn boundary_correction(spec: &PatternSpec) -> Result<FpPoly, AlgebraError> {
    let p = require_prime(spec)?;
    if spec.is_single_zero() {
        Ok(FpPoly::new(p, (0..p).map(|j| u64::from(j != 0))))
    } else {
        Ok(FpPoly::zero(p))
    }
}

/// `(1 + ... + t^(p-1)) f^p - f - rhs`, truncated at `order`.
pub fn functional_equation_residual(
    spec: &PatternSpec,
    order: usize,
) -> Result<TruncatedSeries, AlgebraError> {
    let f = series_from_sequence(spec, order)?;
    residual_of(spec, &f)
}

fn residual_of(spec: &PatternSpec, f: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
    let p = require_prime(spec)?;
    let lhs = frobenius_power(f).mul_poly(&FpPoly::geometric(p))?;
    lhs.sub(f)?.sub(&rhs_series(spec, f.order())?)
}

/// The residual with [`boundary_correction`] also subtracted.
pub fn corrected_residual(
    spec: &PatternSpec,
    order: usize,
) -> Result<TruncatedSeries, AlgebraError> {
    let f = series_from_sequence(spec, order)?;
    corrected_residual_of(spec, &f)
}

fn corrected_residual_of(
    spec: &PatternSpec,
    f: &TruncatedSeries,
) -> Result<TruncatedSeries, AlgebraError> {
    let correction = TruncatedSeries::from_poly(&boundary_correction(spec)?, f.order());
    residual_of(spec, f)?.sub(&correction)
}

/// `(preperiod, period)` of the smallest period `<= max_period` whose
/// periodic tail starts at or before `max_preperiod`.
///
/// On the reversed sequence `r`, `s[i] = s[i + P]` for all `i >= pre` is the
/// statement that `r[..N - pre]` has period `P`, i.e. `z_r[P] >= N - pre - P`.
pub fn find_eventual_period(
    sequence: &[u8],
    max_period: usize,
    max_preperiod: usize,
) -> Option<(usize, usize)> {
    let n = sequence.len();
    let reversed: Vec<u8> = sequence.iter().rev().copied().collect();
    let z = z_array(&reversed);
    (1..=max_period.min(n.saturating_sub(1))).find_map(|period| {
        let preperiod = n - period - z[period].min(n - period);
        (preperiod <= max_preperiod).then_some((preperiod, period))
    })
}

/// Evidence that `f` has degree exactly p over F_p(t).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeEvidence {
    pub spec: PatternSpec,
    pub order: usize,
    /// First nonzero coefficient of the residual against the compact
    /// right-hand side, if any.
    pub residual_first_nonzero: Option<usize>,
    /// Same, after subtracting [`boundary_correction`].
    pub corrected_first_nonzero: Option<usize>,
    /// `(preperiod, period)` if the coefficients look eventually periodic.
    pub period: Option<(usize, usize)>,
}

impl DegreeEvidence {
    /// `f` satisfies a degree-p equation to this order (with the boundary
    /// correction) and no eventual period was found. Evidence, not proof.
    pub fn supports_degree_p(&self) -> bool {
        self.corrected_first_nonzero.is_none() && self.period.is_none()
    }
}

/// Residual check plus an eventual-periodicity scan (periods and
/// preperiods up to `order / 4`). A rational `f` would be eventually
/// periodic; since the degree divides p, aperiodicity points to degree p.
pub fn degree_evidence(spec: &PatternSpec, order: usize) -> Result<DegreeEvidence, AlgebraError> {
    let f = series_from_sequence(spec, order)?;
    let residual = residual_of(spec, &f)?;
    let corrected = corrected_residual_of(spec, &f)?;
    let period = find_eventual_period(f.coefficients(), order / 4, order / 4);
    Ok(DegreeEvidence {
        spec: spec.clone(),
        order,
        residual_first_nonzero: residual.first_nonzero(),
        corrected_first_nonzero: corrected.first_nonzero(),
        period,
    })
}
