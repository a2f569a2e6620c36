//! Uniform-morphism presentations of `a_{p;w}` for prime `p`.
//!
//! The construction has three stages:
//!
//! 1. [`infer_kernel`] closes the root sequence under `n -> a(p n + j)` and
//!    identifies subsequences by fingerprint. This is the usual p-kernel;
//!    its transition `K -> K_j` appends `j` as the *least* significant
//!    digit of the argument.
//! 2. A fixed point of a uniform morphism reads the digits of `n` most
//!    significant first, so the kernel automaton is reversed: a state is
//!    the map `q -> δ*(q, reverse(u))` for the digits `u` read so far, and
//!    its letter codes to the value of the root element it reaches.
//! 3. The reversed automaton is Moore-minimised. Leading zeros never change
//!    `n`, so the minimised start state is its own 0-successor and the
//!    fixed point is prolongable; a fresh start letter is still added if
//!    that ever fails.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::MorphismError;
use crate::words::{digit_char, is_prime, PatternSpec, Word};

pub type Letter = u32;

/// Terms compared against the oracle after a morphism is built.
pub const ORACLE_CHECK_TERMS: usize = 100_000;

/// Cap on reachable transition maps while reversing the kernel automaton.
const MAX_REVERSED_STATES: usize = 200_000;

/// A `width`-uniform substitution on the letters `0..k` with a coding to
/// digits and a prolongable start letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformMorphism {
    width: u32,
    start: Letter,
    images: Vec<Vec<Letter>>,
    coding: Vec<u8>,
}

impl UniformMorphism {
    pub fn new(
        width: u32,
        start: Letter,
        images: Vec<Vec<Letter>>,
        coding: Vec<u8>,
    ) -> Result<Self, MorphismError> {
        let letters = images.len();
        if width < 2 {
            return Err(MorphismError::Invalid(format!("width {width} is below 2")));
        }
        if coding.len() != letters {
            return Err(MorphismError::Invalid(format!(
                "{letters} images but {} codes",
                coding.len()
            )));
        }
        if start as usize >= letters {
            return Err(MorphismError::Invalid(format!(
                "start letter {start} has no image"
            )));
        }
        for (letter, image) in images.iter().enumerate() {
            if image.len() != width as usize {
                return Err(MorphismError::Invalid(format!(
                    "image of {letter} has length {}, expected {width}",
                    image.len()
                )));
            }
            if let Some(bad) = image.iter().find(|&&l| l as usize >= letters) {
                return Err(MorphismError::Invalid(format!(
                    "image of {letter} uses undefined letter {bad}"
                )));
            }
        }
        if let Some(bad) = coding.iter().find(|&&c| c >= 36) {
            return Err(MorphismError::Invalid(format!("code {bad} is not a digit")));
        }
        if images[start as usize][0] != start {
            return Err(MorphismError::Invalid(format!(
                "start letter {start} is not prolongable"
            )));
        }
        Ok(Self {
            width,
            start,
            images,
            coding,
        })
    }

    /// Builds a morphism starting from `root`. If `root` is not its own
    /// first image, a fresh letter `B` is added with
    /// `B -> B root_1 .. root_{p-1}` and the code of `root`.
    pub fn with_fresh_start(
        width: u32,
        root: Letter,
        mut images: Vec<Vec<Letter>>,
        mut coding: Vec<u8>,
    ) -> Result<Self, MorphismError> {
        let Some(root_image) = images.get(root as usize) else {
            return Err(MorphismError::Invalid(format!(
                "root letter {root} has no image"
            )));
        };
        if root_image.first() == Some(&root) {
            return Self::new(width, root, images, coding);
        }
        let fresh = images.len() as Letter;
        let mut image = root_image.clone();
        if image.is_empty() {
            return Err(MorphismError::Invalid(format!("image of {root} is empty")));
        }
        image[0] = fresh;
        let code = coding.get(root as usize).copied().unwrap_or_default();
        images.push(image);
        coding.push(code);
        Self::new(width, fresh, images, coding)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn start(&self) -> Letter {
        self.start
    }

    pub fn alphabet_size(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, letter: Letter) -> &[Letter] {
        &self.images[letter as usize]
    }

    pub fn code(&self, letter: Letter) -> u8 {
        self.coding[letter as usize]
    }

    /// True when the coding is the identity on the alphabet.
    pub fn is_pure(&self) -> bool {
        self.coding
            .iter()
            .enumerate()
            .all(|(letter, &code)| letter == usize::from(code))
    }

    /// The first `n_terms` letters of the fixed point from the start letter.
    ///
    /// Letter `k >= 1` is `σ(letter[k / p])[k % p]`, so a single forward pass
    /// suffices.
    pub fn fixed_point_letters(&self, n_terms: usize) -> Vec<Letter> {
        let width = self.width as usize;
        let mut letters = Vec::with_capacity(n_terms);
        if n_terms == 0 {
            return letters;
        }
        letters.push(self.start);
        for k in 1..n_terms {
            let parent = letters[k / width];
            letters.push(self.images[parent as usize][k % width]);
        }
        letters
    }

    /// Parses the text format written by `Display`.
    pub fn parse(text: &str) -> Result<Self, MorphismError> {
        text.parse()
    }
}

/// The coded fixed point, truncated to `n_terms`.
pub fn expand_fixed_point(mu: &UniformMorphism, n_terms: usize) -> Vec<u8> {
    mu.fixed_point_letters(n_terms)
        .into_iter()
        .map(|letter| mu.coding[letter as usize])
        .collect()
}

/// Same as [`expand_fixed_point`] but wrapped as a [`Word`] over `base`.
pub fn expand_fixed_point_word(mu: &UniformMorphism, n_terms: usize, base: u32) -> Word {
    Word::new(expand_fixed_point(mu, n_terms), base).expect("coding digits exceed the base")
}

impl fmt::Display for UniformMorphism {
    /// `width=p start=S` followed by `LETTER -> IMAGE ; code=DIGIT` lines,
    /// image letters separated by single spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "width={} start={}", self.width, self.start)?;
        for (letter, image) in self.images.iter().enumerate() {
            let mut rendered = String::new();
            for (i, l) in image.iter().enumerate() {
                if i > 0 {
                    rendered.push(' ');
                }
                write!(rendered, "{l}")?;
            }
            writeln!(
                f,
                "{letter} -> {rendered} ; code={}",
                digit_char(self.coding[letter])
            )?;
        }
        Ok(())
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> MorphismError {
    MorphismError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header_field<'a>(
    token: Option<&'a str>,
    key: &str,
    line: usize,
) -> Result<&'a str, MorphismError> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| parse_error(line, format!("expected {key}=<value> in header")))
}

impl FromStr for UniformMorphism {
    type Err = MorphismError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (header_line, header) = lines.next().ok_or_else(|| parse_error(1, "empty input"))?;
        let mut fields = header.split_whitespace();
        let width: u32 = parse_header_field(fields.next(), "width", header_line)?
            .parse()
            .map_err(|_| parse_error(header_line, "width is not an integer"))?;
        let start: Letter = parse_header_field(fields.next(), "start", header_line)?
            .parse()
            .map_err(|_| parse_error(header_line, "start is not a letter"))?;
        if fields.next().is_some() {
            return Err(parse_error(header_line, "trailing fields in header"));
        }

        let mut images = Vec::new();
        let mut coding = Vec::new();
        for (line, body) in lines {
            let (rule, code) = body
                .split_once(';')
                .ok_or_else(|| parse_error(line, "missing ';' before code"))?;
            let (letter, image) = rule
                .split_once("->")
                .ok_or_else(|| parse_error(line, "missing '->'"))?;
            let letter: usize = letter
                .trim()
                .parse()
                .map_err(|_| parse_error(line, "letter is not a non-negative integer"))?;
            if letter != images.len() {
                return Err(parse_error(
                    line,
                    format!("expected letter {}, found {letter}", images.len()),
                ));
            }
            let image = image
                .split_whitespace()
                .map(|l| l.parse::<Letter>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| parse_error(line, "image letter is not an integer"))?;
            let code = code
                .trim()
                .strip_prefix("code=")
                .and_then(|c| {
                    let mut chars = c.chars();
                    match (chars.next(), chars.next()) {
                        (Some(ch), None) => ch.to_digit(36),
                        _ => None,
                    }
                })
                .ok_or_else(|| parse_error(line, "expected code=<digit>"))?;
            images.push(image);
            coding.push(code as u8);
        }
        Self::new(width, start, images, coding)
    }
}

/// One element `n -> a(p^e n + r)` of the p-kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelElement {
    pub exponent: u32,
    pub residue: u64,
    pub fingerprint: Vec<u8>,
}

impl KernelElement {
    /// `K(0) = a(r)`.
    pub fn initial_value(&self) -> u8 {
        self.fingerprint[0]
    }
}

/// The fingerprint-deduplicated kernel with its `K -> K_j` transitions.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub spec: PatternSpec,
    pub fingerprint_len: usize,
    pub elements: Vec<KernelElement>,
    /// `transitions[k][j]` is the element equal to `n -> K_k(p n + j)`.
    pub transitions: Vec<Vec<usize>>,
}

impl Kernel {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// `4 p^(|w|+2)`.
pub fn default_fingerprint_len(spec: &PatternSpec) -> usize {
    4 * (spec.base() as usize).pow(spec.pattern_len() as u32 + 2)
}

/// Closure bound `p^(|w|+2) * p`.
pub fn kernel_limit(spec: &PatternSpec) -> usize {
    (spec.base() as usize)
        .checked_pow(spec.pattern_len() as u32 + 3)
        .unwrap_or(usize::MAX)
}

fn require_prime(spec: &PatternSpec) -> Result<(), MorphismError> {
    if spec.modulus_is_prime() {
        Ok(())
    } else {
        Err(MorphismError::CompositeBase(spec.base()))
    }
}

fn fingerprint(
    spec: &PatternSpec,
    exponent: u32,
    residue: u64,
    len: usize,
) -> Result<Vec<u8>, MorphismError> {
    let overflow = MorphismError::IndexOverflow {
        exponent,
        terms: len,
    };
    let stride = u64::from(spec.base())
        .checked_pow(exponent)
        .ok_or(overflow.clone())?;
    stride
        .checked_mul(len.saturating_sub(1) as u64)
        .and_then(|top| top.checked_add(residue))
        .ok_or(overflow)?;
    Ok((0..len as u64)
        .map(|n| spec.a_value(stride * n + residue))
        .collect())
}

/// Empirical p-kernel of `a_{p;w}` with fingerprints of length
/// `fingerprint_len`. Every identification is re-checked at twice that
/// length.
pub fn infer_kernel(spec: &PatternSpec, fingerprint_len: usize) -> Result<Kernel, MorphismError> {
    require_prime(spec)?;
    let p = spec.base();
    let len = fingerprint_len.max(1);
    let doubled = 2 * len;
    let limit = kernel_limit(spec);

    let root = fingerprint(spec, 0, 0, doubled)?;
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    index.insert(root[..len].to_vec(), 0);
    let mut long = vec![root];
    let mut elements = vec![(0u32, 0u64)];
    let mut transitions: Vec<Vec<usize>> = Vec::new();
    let mut frontier = 0;

    while frontier < elements.len() {
        let level: Vec<usize> = (frontier..elements.len()).collect();
        frontier = elements.len();
        // Children of the whole level are fingerprinted in parallel and
        // merged in a fixed order.
        let children: Vec<(usize, u32, u64, Vec<u8>)> = level
            .par_iter()
            .flat_map_iter(|&k| (0..p).map(move |j| (k, j)))
            .map(|(k, j)| {
                let (exponent, residue) = elements[k];
                let step = u64::from(p)
                    .checked_pow(exponent)
                    .and_then(|s| s.checked_mul(u64::from(j)))
                    .and_then(|s| s.checked_add(residue))
                    .ok_or(MorphismError::IndexOverflow {
                        exponent: exponent + 1,
                        terms: doubled,
                    })?;
                fingerprint(spec, exponent + 1, step, doubled).map(|fp| (k, exponent + 1, step, fp))
            })
            .collect::<Result<_, _>>()?;

        for chunk in children.chunks(p as usize) {
            let mut row = Vec::with_capacity(p as usize);
            for (_, exponent, residue, fp) in chunk {
                let target = match index.get(&fp[..len]) {
                    Some(&existing) => {
                        if long[existing] != *fp {
                            return Err(MorphismError::UnsoundIdentification { len, doubled });
                        }
                        existing
                    }
                    None => {
                        if elements.len() >= limit {
                            return Err(MorphismError::KernelOverflow {
                                limit,
                                fingerprint_len: len,
                            });
                        }
                        index.insert(fp[..len].to_vec(), elements.len());
                        elements.push((*exponent, *residue));
                        long.push(fp.clone());
                        elements.len() - 1
                    }
                };
                row.push(target);
            }
            transitions.push(row);
        }
    }

    let elements = elements
        .into_iter()
        .zip(long)
        .map(|((exponent, residue), mut fp)| {
            fp.truncate(len);
            KernelElement {
                exponent,
                residue,
                fingerprint: fp,
            }
        })
        .collect();
    Ok(Kernel {
        spec: spec.clone(),
        fingerprint_len: len,
        elements,
        transitions,
    })
}

/// Reverses the kernel automaton into a most-significant-digit-first
/// automaton. Returns `(images, coding)` with the identity map as letter 0.
fn reverse_kernel(kernel: &Kernel) -> Result<(Vec<Vec<Letter>>, Vec<u8>), MorphismError> {
    let q = kernel.len();
    let p = kernel.spec.base() as usize;
    let identity: Vec<u32> = (0..q as u32).collect();
    let mut ids: HashMap<Vec<u32>, Letter> = HashMap::new();
    ids.insert(identity.clone(), 0);
    let mut maps = vec![identity];
    let mut images = Vec::new();
    let mut coding = Vec::new();
    let mut next = 0;
    while next < maps.len() {
        let current = maps[next].clone();
        next += 1;
        coding.push(kernel.elements[current[0] as usize].initial_value());
        let mut image = Vec::with_capacity(p);
        for j in 0..p {
            // (T ∘ δ_j)(s) = T(δ(s, j))
            let composed: Vec<u32> = (0..q).map(|s| current[kernel.transitions[s][j]]).collect();
            let letter = match ids.get(&composed) {
                Some(&l) => l,
                None => {
                    if maps.len() >= MAX_REVERSED_STATES {
                        return Err(MorphismError::TooManyStates(MAX_REVERSED_STATES));
                    }
                    let l = maps.len() as Letter;
                    ids.insert(composed.clone(), l);
                    maps.push(composed);
                    l
                }
            };
            image.push(letter);
        }
        images.push(image);
    }
    Ok((images, coding))
}

/// Moore minimisation; letters are renumbered in breadth-first order from
/// `start`. Returns the minimised `(images, coding)` and the new start.
fn minimize(
    images: &[Vec<Letter>],
    coding: &[u8],
    start: Letter,
) -> (Vec<Vec<Letter>>, Vec<u8>, Letter) {
    let mut class: Vec<usize> = coding.iter().map(|&c| usize::from(c)).collect();
    let mut classes = {
        let mut seen = coding.to_vec();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    };
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let refined: Vec<usize> = images
            .iter()
            .enumerate()
            .map(|(s, image)| {
                let mut signature = Vec::with_capacity(image.len() + 1);
                signature.push(class[s]);
                signature.extend(image.iter().map(|&t| class[t as usize]));
                let next = ids.len();
                *ids.entry(signature).or_insert(next)
            })
            .collect();
        let count = ids.len();
        class = refined;
        if count == classes {
            break;
        }
        classes = count;
    }

    let mut relabel: Vec<Option<Letter>> = vec![None; classes];
    let mut representative = Vec::new();
    let mut queue = std::collections::VecDeque::from([start]);
    relabel[class[start as usize]] = Some(0);
    representative.push(start);
    while let Some(s) = queue.pop_front() {
        for &t in &images[s as usize] {
            let c = class[t as usize];
            if relabel[c].is_none() {
                relabel[c] = Some(representative.len() as Letter);
                representative.push(t);
                queue.push_back(t);
            }
        }
    }
    let new_images = representative
        .iter()
        .map(|&s| {
            images[s as usize]
                .iter()
                .map(|&t| relabel[class[t as usize]].expect("reachable"))
                .collect()
        })
        .collect();
    let new_coding = representative.iter().map(|&s| coding[s as usize]).collect();
    (new_images, new_coding, 0)
}

/// A `p`-uniform morphism with coding whose coded fixed point is `a_{p;w}`.
pub fn build_morphism(spec: &PatternSpec) -> Result<UniformMorphism, MorphismError> {
    build_morphism_with(spec, default_fingerprint_len(spec), ORACLE_CHECK_TERMS)
}

/// [`build_morphism`] with an explicit fingerprint length and oracle check
/// length (`0` skips the oracle check).
pub fn build_morphism_with(
    spec: &PatternSpec,
    fingerprint_len: usize,
    oracle_terms: usize,
) -> Result<UniformMorphism, MorphismError> {
    let kernel = infer_kernel(spec, fingerprint_len)?;
    let (images, coding) = reverse_kernel(&kernel)?;
    let (images, coding, start) = minimize(&images, &coding, 0);
    let mu = UniformMorphism::with_fresh_start(spec.base(), start, images, coding)?;
    if oracle_terms > 0 {
        let expanded = expand_fixed_point(&mu, oracle_terms);
        if let Some(index) = (0..oracle_terms).find(|&n| expanded[n] != spec.a_value(n as u64)) {
            return Err(MorphismError::Invalid(format!(
                "coded fixed point disagrees with the oracle at n = {index}"
            )));
        }
    }
    Ok(mu)
}

/// The pure morphism `i -> v_i` with `v_i[k] = i^+` if `k = x` and `i`
/// otherwise, for a single nonzero letter `x` over prime `p`.
pub fn pure_single_letter_morphism(p: u32, x: u8) -> Result<UniformMorphism, MorphismError> {
    if !is_prime(p) || p > crate::words::MAX_BASE {
        return Err(MorphismError::CompositeBase(p));
    }
    if x == 0 || u32::from(x) >= p {
        return Err(MorphismError::InvalidLetter { digit: x, base: p });
    }
    let images = (0..p)
        .map(|i| {
            (0..p)
                .map(|k| if k == u32::from(x) { (i + 1) % p } else { i })
                .collect()
        })
        .collect();
    let coding = (0..p as u8).collect();
    UniformMorphism::new(p, 0, images, coding)
}
