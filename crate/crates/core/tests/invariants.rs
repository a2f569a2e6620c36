//! Cross-module invariants over small parameter grids.

use blockseq::algebra::{corrected_residual, functional_equation_residual};
use blockseq::morphism::{build_morphism, expand_fixed_point, pure_single_letter_morphism};
use blockseq::structure::{classify_all, effective_suffix_predicate};
use blockseq::window::{generate, WindowSpec};
use blockseq::{PatternSpec, Word};

fn all_patterns(base: u32, max_len: usize) -> Vec<PatternSpec> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for mut v in 0..base.pow(len as u32) {
            let mut digits = vec![0u8; len];
            for d in digits.iter_mut().rev() {
                *d = (v % base) as u8;
                v /= base;
            }
            out.push(PatternSpec::new(base, Word::new(digits, base).unwrap()).unwrap());
        }
    }
    out
}

#[test]
fn window_generator_matches_oracle() {
    const TERMS: usize = 100_000;
    for base in [2, 3, 4, 5] {
        for spec in all_patterns(base, 3) {
            let generated = generate(&spec, TERMS).unwrap();
            let oracle = spec.oracle_prefix(TERMS);
            if let Some(n) = (0..TERMS).find(|&n| generated.digits()[n] != oracle[n]) {
                panic!("{spec}: first disagreement at n = {n}");
            }
        }
    }
}

#[test]
fn phi_has_order_m() {
    for base in [2, 3, 5] {
        for spec in all_patterns(base, 2) {
            let window = WindowSpec::new(&spec).unwrap();
            let original = generate(&spec, (base * base * base) as usize).unwrap();
            let mut word = original.clone();
            for _ in 0..base {
                word = window.phi(&word).unwrap();
            }
            assert_eq!(word, original, "{spec}");
        }
    }
}

#[test]
fn morphisms_match_oracle() {
    const TERMS: usize = 20_000;
    for base in [2, 3, 5] {
        let max_len = if base == 5 { 2 } else { 3 };
        for spec in all_patterns(base, max_len) {
            let mu = build_morphism(&spec).unwrap();
            assert!(mu.image(mu.start())[0] == mu.start());
            assert!((0..mu.alphabet_size() as u32).all(|l| mu.image(l).len() == base as usize));
            assert_eq!(
                expand_fixed_point(&mu, TERMS),
                spec.oracle_prefix(TERMS),
                "{spec}"
            );
        }
    }
}

#[test]
fn single_letter_pure_presentations_agree() {
    for base in [2u32, 3, 5] {
        for x in 1..base as u8 {
            let spec = PatternSpec::new(base, Word::new(vec![x], base).unwrap()).unwrap();
            let pure = pure_single_letter_morphism(base, x).unwrap();
            let built = build_morphism(&spec).unwrap();
            assert_eq!(
                expand_fixed_point(&pure, 100_000),
                expand_fixed_point(&built, 100_000),
                "{spec}"
            );
        }
    }
}

#[test]
fn block_dichotomy_with_effective_predicate() {
    for base in [2, 3, 5] {
        for spec in all_patterns(base, 3) {
            let prefix = generate(&spec, 30_000).unwrap().into_digits();
            let summary = classify_all(&spec, &prefix).unwrap();
            assert_eq!(summary.type1 + summary.type2, summary.blocks);
            let expected_type2 = (0..summary.blocks)
                .filter(|&n| effective_suffix_predicate(&spec, n))
                .count() as u64;
            assert_eq!(summary.type2, expected_type2, "{spec}");
        }
    }
}

#[test]
fn residual_vanishes_except_single_zero() {
    for base in [2, 3, 5] {
        for spec in all_patterns(base, 3) {
            let residual = functional_equation_residual(&spec, 10_000).unwrap();
            if spec.is_single_zero() {
                assert_eq!(residual.first_nonzero(), Some(1), "{spec}");
            } else {
                assert!(residual.is_zero(), "{spec}: {:?}", residual.first_nonzero());
            }
            assert!(
                corrected_residual(&spec, 10_000).unwrap().is_zero(),
                "{spec}"
            );
        }
    }
}
