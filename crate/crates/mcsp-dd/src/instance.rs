//! Problem instances: a pair of related strings over a finite alphabet.
//!
//! Two strings are *related* when every symbol occurs the same number of
//! times in each of them; only related pairs admit a common partition.
//! This module parses instances from the two-line text format, validates
//! relatedness, and generates random instances with either a uniform
//! ("linear") or an index-weighted ("skewed") symbol distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Symbols used by the generator, in index order.
const GENERATOR_SYMBOLS: &[u8] =
    b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

/// Largest alphabet the generator can produce.
pub const MAX_ALPHABET_SIZE: usize = GENERATOR_SYMBOLS.len();

/// Name of the seeded generator algorithm, recorded in benchmark metadata
/// so that result files identify how their instances were produced.
pub const GENERATOR_RNG_NAME: &str = "chacha8";

/// A pair of related strings; the problem input.
///
/// Immutable after construction, so instances can be shared freely
/// across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    s1: Vec<u8>,
    s2: Vec<u8>,
    alphabet: Vec<u8>,
}

impl Instance {
    /// Builds an instance from two symbol sequences, validating length,
    /// symbol legality and relatedness.
    pub fn new(s1: Vec<u8>, s2: Vec<u8>) -> Result<Self, InstanceError> {
        if s1.is_empty() || s2.is_empty() {
            return Err(InstanceError::MalformedInput(
                "both strings must be non-empty".into(),
            ));
        }
        for &b in s1.iter().chain(s2.iter()) {
            if !is_legal_symbol(b) {
                return Err(InstanceError::MalformedInput(format!(
                    "illegal symbol byte 0x{b:02x}; symbols must be printable non-whitespace ASCII"
                )));
            }
        }
        if s1.len() != s2.len() {
            return Err(InstanceError::UnrelatedStrings(format!(
                "length mismatch: {} vs {}",
                s1.len(),
                s2.len()
            )));
        }
        if let Some(sym) = first_count_mismatch(&s1, &s2) {
            return Err(InstanceError::UnrelatedStrings(format!(
                "symbol '{}' occurs {} times in the first string but {} times in the second",
                sym as char,
                count_of(&s1, sym),
                count_of(&s2, sym)
            )));
        }
        let mut alphabet: Vec<u8> = s1.to_vec();
        alphabet.sort_unstable();
        alphabet.dedup();
        Ok(Self { s1, s2, alphabet })
    }

    /// Length of each string.
    pub fn n(&self) -> usize {
        self.s1.len()
    }

    pub fn s1(&self) -> &[u8] {
        &self.s1
    }

    pub fn s2(&self) -> &[u8] {
        &self.s2
    }

    /// Distinct symbols occurring in the instance, sorted.
    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    /// Alphabet size (distinct symbols actually occurring).
    pub fn sigma(&self) -> usize {
        self.alphabet.len()
    }

    /// Serializes to the two-line text format accepted by [`parse_instance`].
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(2 * self.n() + 2);
        out.push_str(std::str::from_utf8(&self.s1).expect("symbols are ASCII"));
        out.push('\n');
        out.push_str(std::str::from_utf8(&self.s2).expect("symbols are ASCII"));
        out.push('\n');
        out
    }
}

/// Errors produced when constructing or parsing an [`Instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    /// Input text is not a well-formed instance (missing lines, illegal bytes).
    MalformedInput(String),
    /// The two strings are not related; the message names the first
    /// offending symbol or the length mismatch.
    UnrelatedStrings(String),
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::MalformedInput(msg) => write!(f, "malformed input: {msg}"),
            InstanceError::UnrelatedStrings(msg) => write!(f, "strings are not related: {msg}"),
        }
    }
}

impl std::error::Error for InstanceError {}

fn is_legal_symbol(b: u8) -> bool {
    (0x21..0x7f).contains(&b)
}

fn counts(s: &[u8]) -> [usize; 256] {
    let mut c = [0usize; 256];
    for &b in s {
        c[b as usize] += 1;
    }
    c
}

fn count_of(s: &[u8], sym: u8) -> usize {
    s.iter().filter(|&&b| b == sym).count()
}

/// First symbol (in order of appearance in `s1`, then `s2`) whose counts differ.
fn first_count_mismatch(s1: &[u8], s2: &[u8]) -> Option<u8> {
    let c1 = counts(s1);
    let c2 = counts(s2);
    s1.iter()
        .chain(s2.iter())
        .copied()
        .find(|&b| c1[b as usize] != c2[b as usize])
}

/// True iff the strings have equal length and equal per-symbol counts.
pub fn is_related(s1: &[u8], s2: &[u8]) -> bool {
    s1.len() == s2.len() && counts(s1) == counts(s2)
}

/// Parses the two-line instance format: line 1 is `s1`, line 2 is `s2`.
/// LF or CRLF line endings are accepted and trailing blank lines ignored.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut lines = text
        .lines()
        .map(|l| l.trim_end())
        .filter(|l| !l.is_empty());
    let s1 = lines
        .next()
        .ok_or_else(|| InstanceError::MalformedInput("expected two non-empty lines".into()))?;
    let s2 = lines
        .next()
        .ok_or_else(|| InstanceError::MalformedInput("expected two non-empty lines".into()))?;
    Instance::new(s1.as_bytes().to_vec(), s2.as_bytes().to_vec())
}

/// Symbol distribution used by [`generate_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Every symbol is equally likely.
    Linear,
    /// Symbol with 1-based index `i` has probability `i / (1 + 2 + … + sigma)`.
    Skewed,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Linear => write!(f, "linear"),
            Distribution::Skewed => write!(f, "skewed"),
        }
    }
}

/// Parameters for random instance generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub alphabet_size: usize,
    pub distribution: Distribution,
    pub seed: u64,
}

/// Generates a random instance: `s1` is drawn i.i.d. per position from the
/// configured distribution and `s2` is a Fisher–Yates shuffle of `s1`'s
/// symbols driven by the same seeded stream, so the pair is related by
/// construction and byte-identical across runs and platforms.
///
/// # Panics
/// Panics if `n == 0` or `alphabet_size` is not in `1..=MAX_ALPHABET_SIZE`.
pub fn generate_instance(config: &GeneratorConfig) -> Instance {
    assert!(config.n >= 1, "instance length must be at least 1");
    assert!(
        (1..=MAX_ALPHABET_SIZE).contains(&config.alphabet_size),
        "alphabet size must be in 1..={MAX_ALPHABET_SIZE}"
    );
    let sigma = config.alphabet_size as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut s1 = Vec::with_capacity(config.n);
    match config.distribution {
        Distribution::Linear => {
            for _ in 0..config.n {
                let idx = rng.random_range(0..sigma);
                s1.push(GENERATOR_SYMBOLS[idx as usize]);
            }
        }
        Distribution::Skewed => {
            // P(index i, 1-based) = i / (sigma (sigma + 1) / 2), sampled
            // exactly over the integers.
            let total = sigma * (sigma + 1) / 2;
            for _ in 0..config.n {
                let mut u = rng.random_range(0..total);
                let mut i = 1u32;
                while u >= i {
                    u -= i;
                    i += 1;
                }
                s1.push(GENERATOR_SYMBOLS[(i - 1) as usize]);
            }
        }
    }

    let mut s2 = s1.clone();
    for i in (1..s2.len()).rev() {
        let j = rng.random_range(0..=i as u64) as usize;
        s2.swap(i, j);
    }

    Instance::new(s1, s2).expect("a shuffled copy is related by construction")
}
