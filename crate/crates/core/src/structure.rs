//! Block classification and power-prefix scans for prime bases.
//!
//! A p-block is `(a(pn), .., a(pn + p - 1))`. Writing `[pn + i]_p` as
//! `[n]_p` followed by the digit `i` (for `n > 0`), the only occurrence of
//! `w` that the last digit can add ends at `i = w[|w|-1]` and needs
//! `w^⋄` (w without its last letter) to end `[n]_p`. So every block is
//! either constant (type 1) or constant except a `+1` at index
//! `w[|w|-1]` (type 2). For `n = 0` the expansion of `i` is the single
//! digit `i` with nothing before it; [`effective_suffix_predicate`] models
//! that, [`suffix_predicate`] uses the canonical `[0]_p = "0"`.

use std::fmt;

use rayon::prelude::*;

use crate::error::StructureError;
use crate::window::generate;
use crate::words::{to_base, PatternSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockClass {
    /// All p values equal.
    Type1 { value: u8 },
    /// All values equal `base_value` except `base_value + 1` at
    /// `deviant_index`.
    Type2 { base_value: u8, deviant_index: u8 },
}

impl BlockClass {
    pub fn is_type2(&self) -> bool {
        matches!(self, BlockClass::Type2 { .. })
    }
}

fn require_prime(spec: &PatternSpec) -> Result<(), StructureError> {
    if spec.modulus_is_prime() {
        Ok(())
    } else {
        Err(StructureError::CompositeBase(spec.base()))
    }
}

/// `w^⋄` is a suffix of the canonical `[n]_p`.
pub fn suffix_predicate(spec: &PatternSpec, n: u64) -> bool {
    let expansion = to_base(n, spec.base()).expect("base validated by spec");
    spec.pattern()
        .without_last()
        .is_suffix_of(expansion.digits())
}

/// `w^⋄` is a suffix of the digits that precede the last digit of
/// `[pn + i]_p`: `[n]_p` for `n > 0`, the empty word for `n = 0`.
pub fn effective_suffix_predicate(spec: &PatternSpec, n: u64) -> bool {
    if n == 0 {
        spec.pattern_len() == 1
    } else {
        suffix_predicate(spec, n)
    }
}

/// Shape of a block, without reference to the pattern. For `p = 2` a
/// non-constant block fits type 2 at either index; `preferred` breaks the
/// tie.
fn block_shape(block: &[u8], p: u8, preferred: u8) -> Option<BlockClass> {
    let first = block[0];
    if block.iter().all(|&v| v == first) {
        return Some(BlockClass::Type1 { value: first });
    }
    let candidates: Vec<u8> = if p == 2 {
        vec![preferred, 1 - preferred]
    } else {
        (0..p).collect()
    };
    candidates.into_iter().find_map(|i| {
        let base_value = block[usize::from((i + 1) % p)];
        let lifted = (base_value + 1) % p;
        let fits = block.iter().enumerate().all(|(k, &v)| {
            if k == usize::from(i) {
                v == lifted
            } else {
                v == base_value
            }
        });
        fits.then_some(BlockClass::Type2 {
            base_value,
            deviant_index: i,
        })
    })
}

/// Classifies block `n` of `prefix` (the generated sequence). Any block
/// that is neither type 1 nor type 2 with deviant index `w[|w|-1]`, or whose
/// type disagrees with [`effective_suffix_predicate`], is an error.
pub fn classify_block(
    spec: &PatternSpec,
    n: u64,
    prefix: &[u8],
) -> Result<BlockClass, StructureError> {
    require_prime(spec)?;
    let p = spec.base() as usize;
    let start = usize::try_from(n)
        .ok()
        .and_then(|n| n.checked_mul(p))
        .filter(|&s| s + p <= prefix.len())
        .ok_or(StructureError::PrefixTooShort {
            block: n,
            len: prefix.len(),
        })?;
    let block = &prefix[start..start + p];
    let last = spec.last_digit();
    let class =
        block_shape(block, p as u8, last).ok_or_else(|| StructureError::BlockViolation {
            block: n,
            detail: format!("{block:?} is neither constant nor single-deviant"),
        })?;
    if let BlockClass::Type2 { deviant_index, .. } = class {
        if deviant_index != last {
            return Err(StructureError::BlockViolation {
                block: n,
                detail: format!("deviates at index {deviant_index}, expected {last}"),
            });
        }
    }
    let expected = effective_suffix_predicate(spec, n);
    if class.is_type2() != expected {
        return Err(StructureError::BlockViolation {
            block: n,
            detail: format!(
                "is {} but the suffix predicate says {}",
                if class.is_type2() { "type 2" } else { "type 1" },
                if expected { "type 2" } else { "type 1" },
            ),
        });
    }
    Ok(class)
}

/// Aggregate classification of every complete block in a prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockSummary {
    pub blocks: u64,
    pub type1: u64,
    pub type2: u64,
    /// Blocks where the type disagrees with the canonical-expansion
    /// predicate [`suffix_predicate`].
    pub canonical_mismatches: Vec<u64>,
}

/// Classifies all `prefix.len() / p` blocks, in parallel over disjoint
/// ranges.
pub fn classify_all(spec: &PatternSpec, prefix: &[u8]) -> Result<BlockSummary, StructureError> {
    require_prime(spec)?;
    let blocks = (prefix.len() / spec.base() as usize) as u64;
    let results: Vec<(BlockClass, bool)> = (0..blocks)
        .into_par_iter()
        .map(|n| {
            let class = classify_block(spec, n, prefix)?;
            Ok((class, class.is_type2() != suffix_predicate(spec, n)))
        })
        .collect::<Result<_, StructureError>>()?;
    let mut summary = BlockSummary {
        blocks,
        ..Default::default()
    };
    for (n, (class, mismatch)) in results.into_iter().enumerate() {
        if class.is_type2() {
            summary.type2 += 1;
        } else {
            summary.type1 += 1;
        }
        if mismatch {
            summary.canonical_mismatches.push(n as u64);
        }
    }
    Ok(summary)
}

/// Z-array: `z[i]` is the length of the longest common prefix of `s` and
/// `s[i..]`, with `z[0] = |s|`.
pub fn z_array(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0, 0);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerPrefixReport {
    pub pattern: Option<PatternSpec>,
    pub exponent: usize,
    pub prefix_scanned: usize,
    /// Every `L` such that the first `e L` terms are `e` copies of one block.
    pub found_lengths: Vec<usize>,
}

/// All `L` with `1 <= L <= |prefix| / e` such that `prefix[..eL]` is a
/// block repeated `e` times. Linear time: `v^e` is a prefix iff
/// `z[L] >= (e - 1) L`.
pub fn scan_power_prefixes(prefix: &[u8], exponent: usize) -> PowerPrefixReport {
    assert!(exponent >= 2, "power exponent must be at least 2");
    let z = z_array(prefix);
    let found_lengths = (1..=prefix.len() / exponent)
        .filter(|&len| z[len] >= (exponent - 1) * len)
        .collect();
    PowerPrefixReport {
        pattern: None,
        exponent,
        prefix_scanned: prefix.len(),
        found_lengths,
    }
}

/// Named structural claims checked on finite prefixes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Claim {
    /// Every `v^(p+1)` prefix with `|v| >= 2 p^|w|` has `p^(|w|-1) | |v|`.
    PowerLengthMultiple,
    /// No `v^(p+1)` prefix with `|v| = i p^(|w|-1)`, `i >= p + 1`.
    PowerLengthBound,
    /// `w = 0`, `p = 2`: no square prefix with `|v| >= 5`.
    ZeroSquareBase2,
    /// `w = 0`, `p >= 3`: no square prefix with `|v| >= p^2`.
    ZeroSquare,
    /// `w = 10`, `p = 2`: the only square prefix has `|v| = 1`.
    TenSquareBase2,
    /// `w = 10`, `p >= 3`: no `v^p` prefix with `|v| > p^2`.
    TenPower,
}

impl Claim {
    pub fn id(&self) -> &'static str {
        match self {
            Claim::PowerLengthMultiple => "power-length-multiple",
            Claim::PowerLengthBound => "power-length-bound",
            Claim::ZeroSquareBase2 => "zero-square-base2",
            Claim::ZeroSquare => "zero-square",
            Claim::TenSquareBase2 => "ten-square-base2",
            Claim::TenPower => "ten-power",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// Evidence for one claim on one pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct ClaimReport {
    pub claim: Claim,
    pub pattern: PatternSpec,
    pub exponent: usize,
    pub scan_length: usize,
    /// Every power-prefix length found.
    pub evidence: Vec<usize>,
    /// Lengths that break the claim.
    pub violations: Vec<usize>,
    pub verdict: Verdict,
}

impl ClaimReport {
    fn new(
        claim: Claim,
        scan: PowerPrefixReport,
        pattern: &PatternSpec,
        violations: Vec<usize>,
    ) -> Self {
        let verdict = if violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            claim,
            pattern: pattern.clone(),
            exponent: scan.exponent,
            scan_length: scan.prefix_scanned,
            evidence: scan.found_lengths,
            violations,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn into_result(self) -> Result<Self, StructureError> {
        if self.passed() {
            Ok(self)
        } else {
            Err(StructureError::ClaimViolation(Box::new(self)))
        }
    }
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for ClaimReport {
    /// One record: `claim=.. m=.. w=.. exponent=.. scan=.. evidence=[..]
    /// violations=[..] verdict=PASS|FAIL`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "claim={} m={} w={} exponent={} scan={} evidence=[{}] violations=[{}] verdict={}",
            self.claim,
            self.pattern.base(),
            self.pattern.pattern(),
            self.exponent,
            self.scan_length,
            join(&self.evidence),
            join(&self.violations),
            self.verdict
        )
    }
}

/// `2^20` for `p = 2`, otherwise `p^12` capped at `2^22`.
pub fn default_scan_length(p: u32) -> usize {
    if p == 2 {
        1 << 20
    } else {
        u64::from(p)
            .checked_pow(12)
            .map_or(1 << 22, |n| n.min(1 << 22) as usize)
    }
}

fn sequence(spec: &PatternSpec, scan_length: usize) -> Vec<u8> {
    generate(spec, scan_length)
        .expect("prime-base spec within scan range")
        .into_digits()
}

/// Scans `v^(p+1)` prefixes and reports lengths `>= 2 p^|w|` that are not
/// multiples of `p^(|w|-1)`.
pub fn evaluate_multiple_property(
    spec: &PatternSpec,
    scan_length: usize,
) -> Result<ClaimReport, StructureError> {
    require_prime(spec)?;
    let prefix = sequence(spec, scan_length);
    Ok(multiple_property_on(spec, &prefix))
}

fn multiple_property_on(spec: &PatternSpec, prefix: &[u8]) -> ClaimReport {
    let p = spec.base() as usize;
    let k = spec.pattern_len() as u32;
    let threshold = 2usize.saturating_mul(p.saturating_pow(k));
    let modulus = p.saturating_pow(k - 1);
    let scan = scan_power_prefixes(prefix, p + 1);
    let violations = scan
        .found_lengths
        .iter()
        .copied()
        .filter(|&len| len >= threshold && len % modulus != 0)
        .collect();
    ClaimReport::new(Claim::PowerLengthMultiple, scan, spec, violations)
}

/// [`evaluate_multiple_property`], failing on any violation.
pub fn check_multiple_property(
    spec: &PatternSpec,
    scan_length: usize,
) -> Result<ClaimReport, StructureError> {
    evaluate_multiple_property(spec, scan_length)?.into_result()
}

/// Evaluates every exclusion claim that applies to the pattern:
/// `0` and `10` get their dedicated bounds, and every pattern with
/// `|w| > 1` gets the general `v^(p+1)` length bound. Single nonzero
/// letters have none.
pub fn evaluate_power_exclusions(
    spec: &PatternSpec,
    scan_length: usize,
) -> Result<Vec<ClaimReport>, StructureError> {
    require_prime(spec)?;
    let prefix = sequence(spec, scan_length);
    let p = spec.base() as usize;
    let digits = spec.pattern().digits();
    let mut reports = Vec::new();

    if digits == [0] {
        let scan = scan_power_prefixes(&prefix, 2);
        let (claim, bound) = if p == 2 {
            (Claim::ZeroSquareBase2, 5)
        } else {
            (Claim::ZeroSquare, p * p)
        };
        let violations = scan
            .found_lengths
            .iter()
            .copied()
            .filter(|&l| l >= bound)
            .collect();
        reports.push(ClaimReport::new(claim, scan, spec, violations));
    }
    if digits == [1, 0] {
        if p == 2 {
            let scan = scan_power_prefixes(&prefix, 2);
            let violations = scan
                .found_lengths
                .iter()
                .copied()
                .filter(|&l| l != 1)
                .collect();
            reports.push(ClaimReport::new(
                Claim::TenSquareBase2,
                scan,
                spec,
                violations,
            ));
        } else {
            let scan = scan_power_prefixes(&prefix, p);
            let violations = scan
                .found_lengths
                .iter()
                .copied()
                .filter(|&l| l > p * p)
                .collect();
            reports.push(ClaimReport::new(Claim::TenPower, scan, spec, violations));
        }
    }
    if digits.len() > 1 {
        let unit = p.saturating_pow(digits.len() as u32 - 1);
        let scan = scan_power_prefixes(&prefix, p + 1);
        let violations = scan
            .found_lengths
            .iter()
            .copied()
            .filter(|&l| l % unit == 0 && l / unit > p)
            .collect();
        reports.push(ClaimReport::new(
            Claim::PowerLengthBound,
            scan,
            spec,
            violations,
        ));
    }
    Ok(reports)
}

/// [`evaluate_power_exclusions`], failing on the first violated claim.
pub fn check_power_exclusions(
    spec: &PatternSpec,
    scan_length: usize,
) -> Result<Vec<ClaimReport>, StructureError> {
    evaluate_power_exclusions(spec, scan_length)?
        .into_iter()
        .map(ClaimReport::into_result)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u32, w: &str) -> PatternSpec {
        PatternSpec::parse(p, w).unwrap()
    }

    fn naive_powers(s: &[u8], e: usize) -> Vec<usize> {
        (1..=s.len() / e)
            .filter(|&l| (1..e).all(|c| s[c * l..(c + 1) * l] == s[..l]))
            .collect()
    }

    #[test]
    fn classify_examples() {
        let rs = spec(2, "11");
        let seq = generate(&rs, 32).unwrap().into_digits();
        assert_eq!(
            classify_block(&rs, 0, &seq).unwrap(),
            BlockClass::Type1 { value: 0 }
        );
        assert_eq!(
            classify_block(&rs, 1, &seq).unwrap(),
            BlockClass::Type2 {
                base_value: 0,
                deviant_index: 1
            }
        );
        // [6]_2 = 110 does not end in w^⋄ = 1; a(12) = a(13) = 1.
        assert_eq!(
            classify_block(&rs, 6, &seq).unwrap(),
            BlockClass::Type1 { value: 1 }
        );
        assert!(matches!(
            classify_block(&rs, 16, &seq),
            Err(StructureError::PrefixTooShort { block: 16, len: 32 })
        ));
    }

    #[test]
    fn classify_flags_broken_blocks() {
        let s = spec(3, "21");
        let seq = generate(&s, 30).unwrap().into_digits();
        let mut broken = seq.clone();
        broken[0] = 2;
        broken[1] = 1;
        assert!(matches!(
            classify_block(&s, 0, &broken),
            Err(StructureError::BlockViolation { block: 0, .. })
        ));
        // Correct shape, wrong deviant index.
        let mut moved = seq.clone();
        moved[..3].copy_from_slice(&[1, 0, 0]);
        assert!(matches!(
            classify_block(&s, 0, &moved),
            Err(StructureError::BlockViolation { .. })
        ));
        assert!(matches!(
            classify_block(&spec(4, "1"), 0, &[0; 8]),
            Err(StructureError::CompositeBase(4))
        ));
    }

    #[test]
    fn single_letter_blocks_are_all_type2() {
        for (p, w) in [(2, "1"), (2, "0"), (3, "0"), (3, "2"), (5, "3")] {
            let s = spec(p, w);
            let seq = generate(&s, 5000).unwrap().into_digits();
            let summary = classify_all(&s, &seq).unwrap();
            assert_eq!(summary.type1, 0, "{s}");
            assert_eq!(summary.type2, summary.blocks);
            assert!(summary.canonical_mismatches.is_empty());
        }
    }

    #[test]
    fn canonical_predicate_differs_only_at_zero() {
        for (p, w) in [(2, "01"), (2, "00"), (3, "02"), (5, "04")] {
            let s = spec(p, w);
            let seq = generate(&s, 5000).unwrap().into_digits();
            assert_eq!(
                classify_all(&s, &seq).unwrap().canonical_mismatches,
                vec![0],
                "{s}"
            );
        }
        let s = spec(2, "001");
        let seq = generate(&s, 5000).unwrap().into_digits();
        assert!(classify_all(&s, &seq)
            .unwrap()
            .canonical_mismatches
            .is_empty());
    }

    #[test]
    fn z_array_examples() {
        assert_eq!(z_array(b"aaaaa"), [5, 4, 3, 2, 1]);
        assert_eq!(z_array(b"aaabaab"), [7, 2, 1, 0, 2, 1, 0]);
        assert_eq!(z_array(b"abacaba"), [7, 0, 1, 0, 3, 0, 1]);
        assert!(z_array(b"").is_empty());
    }

    #[test]
    fn scan_examples() {
        let ten = generate(&spec(2, "10"), 1 << 20).unwrap().into_digits();
        assert_eq!(scan_power_prefixes(&ten, 2).found_lengths, [1]);
        let tm = generate(&spec(2, "1"), 64).unwrap().into_digits();
        let found = scan_power_prefixes(&tm, 2).found_lengths;
        assert_eq!(found, naive_powers(&tm, 2));
        assert!(!found.iter().any(|&l| l <= 3));
        let zero = generate(&spec(2, "0"), 64).unwrap().into_digits();
        let found = scan_power_prefixes(&zero, 2).found_lengths;
        assert!(!found.contains(&1));
        assert!(found.contains(&2));
    }

    #[test]
    fn zero_base2_squares() {
        // a_{2;0} starts 101001 101001, so |v| = 6 is a square prefix.
        let s = spec(2, "0");
        let reports = evaluate_power_exclusions(&s, 1 << 20).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].evidence, [2, 6]);
        assert_eq!(reports[0].violations, [6]);
        assert!(matches!(
            check_power_exclusions(&s, 1 << 20),
            Err(StructureError::ClaimViolation(_))
        ));
    }

    #[test]
    fn exclusions_hold_elsewhere() {
        let three = check_power_exclusions(&spec(3, "0"), 59_049).unwrap();
        assert!(three[0].evidence.iter().all(|&l| l < 9));
        let ten = check_power_exclusions(&spec(2, "10"), 1 << 20).unwrap();
        assert_eq!(ten.len(), 2);
        assert_eq!(ten[0].evidence, [1]);
        assert!(check_power_exclusions(&spec(2, "1"), 1 << 12)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn multiple_property_examples() {
        assert!(check_multiple_property(&spec(2, "11"), 1 << 20)
            .unwrap()
            .passed());
        assert!(check_multiple_property(&spec(3, "12"), 531_441)
            .unwrap()
            .passed());
        assert!(check_multiple_property(&spec(2, "1"), 1 << 20)
            .unwrap()
            .passed());
    }

    #[test]
    fn report_format() {
        let report = check_multiple_property(&spec(2, "10"), 64).unwrap();
        assert_eq!(
            report.to_string(),
            "claim=power-length-multiple m=2 w=10 exponent=3 scan=64 evidence=[] violations=[] verdict=PASS"
        );
    }

    #[test]
    fn scan_defaults() {
        assert_eq!(default_scan_length(2), 1 << 20);
        assert_eq!(default_scan_length(3), 531_441);
        assert_eq!(default_scan_length(5), 1 << 22);
    }

    #[test]
    fn doubling_scan_keeps_earlier_lengths() {
        for (p, w) in [(2, "0"), (3, "0"), (2, "110"), (5, "10")] {
            let s = spec(p, w);
            let seq = generate(&s, 1 << 16).unwrap().into_digits();
            let small = scan_power_prefixes(&seq[..1 << 15], 2).found_lengths;
            let large = scan_power_prefixes(&seq, 2).found_lengths;
            let bounded: Vec<usize> = large.into_iter().filter(|&l| l <= (1 << 15) / 2).collect();
            assert_eq!(small, bounded);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn scanner_matches_naive(
                alphabet in 1u8..=5,
                raw in proptest::collection::vec(any::<u8>(), 0..1000),
                e in 2usize..5,
            ) {
                let s: Vec<u8> = raw.into_iter().map(|b| b % alphabet).collect();
                prop_assert_eq!(scan_power_prefixes(&s, e).found_lengths, naive_powers(&s, e));
            }

            #[test]
            fn scanner_finds_planted_powers(
                block in proptest::collection::vec(0u8..3, 1..20),
                e in 2usize..5,
                tail in proptest::collection::vec(0u8..3, 0..30),
            ) {
                let mut s = block.repeat(e);
                s.extend(tail);
                prop_assert!(scan_power_prefixes(&s, e).found_lengths.contains(&block.len()));
            }
        }
    }
}
