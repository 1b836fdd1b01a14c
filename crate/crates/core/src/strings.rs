//! Bit strings, prefix order, tupling and the `#`-alphabet encoding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A finite word over `{0,1}`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StringError {
    #[error("invalid bit character {0:?} (expected '0' or '1')")]
    BadBit(char),
    #[error("invalid symbol {0:?} (expected '0', '1' or '#')")]
    BadSymbol(char),
    #[error("malformed #-alphabet encoding: {0}")]
    MalformedEncoding(&'static str),
    #[error("tuple must have at least one component")]
    EmptyTuple,
}

impl BitString {
    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// `bit` repeated `n` times.
    pub fn repeat(bit: bool, n: usize) -> Self {
        BitString(vec![bit; n])
    }

    pub fn ones(n: usize) -> Self {
        Self::repeat(true, n)
    }

    pub fn zeros(n: usize) -> Self {
        Self::repeat(false, n)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn first(&self) -> Option<bool> {
        self.0.first().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn pop(&mut self) -> Option<bool> {
        self.0.pop()
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// The first `min(n, |self|)` bits.
    pub fn truncate(&self, n: usize) -> BitString {
        BitString(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn truncate_in_place(&mut self, n: usize) {
        self.0.truncate(n);
    }

    /// `self ⊆ other`: self is an initial segment of other.
    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }

    /// All prefixes, shortest first (ε, a^{≤1}, …, a).
    pub fn prefixes(&self) -> impl Iterator<Item = BitString> + '_ {
        (0..=self.len()).map(move |n| self.truncate(n))
    }

    /// True if the string consists of zeros only (ε included).
    pub fn is_all_zeros(&self) -> bool {
        self.0.iter().all(|b| !*b)
    }

    /// All strings of length exactly `n`, in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = BitString> {
        assert!(n < usize::BITS as usize, "enumeration length too large");
        (0..(1usize << n)).map(move |v| BitString((0..n).rev().map(|i| (v >> i) & 1 == 1).collect()))
    }

    /// All strings of length at most `n`, shortest first.
    pub fn all_up_to(n: usize) -> impl Iterator<Item = BitString> {
        (0..=n).flat_map(BitString::all_of_length)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = StringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(StringError::BadBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for literals in tests and machine builders. Panics on bad input.
pub fn bits(s: &str) -> BitString {
    s.parse().expect("bit literal")
}

pub fn truncate(a: &BitString, n: usize) -> BitString {
    a.truncate(n)
}

pub fn is_prefix(b: &BitString, a: &BitString) -> bool {
    b.is_prefix_of(a)
}

/// `⟨a,b⟩ = dbl(a) · 11 · b` with `dbl` mapping 0 ↦ 00 and 1 ↦ 01.
pub fn pair(a: &BitString, b: &BitString) -> BitString {
    let mut out = Vec::with_capacity(2 * a.len() + 2 + b.len());
    for &bit in a.bits() {
        out.push(false);
        out.push(bit);
    }
    out.push(true);
    out.push(true);
    out.extend_from_slice(b.bits());
    BitString(out)
}

/// Splits a pair encoding into its two components; `None` if malformed.
pub fn unpair(t: &BitString) -> Option<(BitString, BitString)> {
    let bits = t.bits();
    let mut first = Vec::new();
    let mut i = 0;
    while i + 1 < bits.len() {
        match (bits[i], bits[i + 1]) {
            (false, b) => first.push(b),
            (true, true) => {
                return Some((BitString(first), BitString(bits[i + 2..].to_vec())));
            }
            (true, false) => return None,
        }
        i += 2;
    }
    None
}

/// First projection of a pair; ε when malformed.
pub fn proj1(t: &BitString) -> BitString {
    unpair(t).map(|(a, _)| a).unwrap_or_default()
}

/// Second projection of a pair; ε when malformed.
pub fn proj2(t: &BitString) -> BitString {
    unpair(t).map(|(_, b)| b).unwrap_or_default()
}

/// Right-nested k-tuple `⟨a₁,⟨a₂,…,a_k⟩⟩`; a 1-tuple is its component.
pub fn tuple_encode(parts: &[BitString]) -> Result<BitString, StringError> {
    let (last, init) = parts.split_last().ok_or(StringError::EmptyTuple)?;
    Ok(init.iter().rev().fold(last.clone(), |acc, p| pair(p, &acc)))
}

/// `π_{i,k}` for 1 ≤ i ≤ k; malformed input (or out-of-range i) yields ε.
pub fn tuple_project(i: usize, k: usize, t: &BitString) -> BitString {
    if i == 0 || i > k {
        return BitString::empty();
    }
    let mut rest = t.clone();
    for _ in 1..i {
        match unpair(&rest) {
            Some((_, tail)) => rest = tail,
            None => return BitString::empty(),
        }
    }
    if i == k {
        rest
    } else {
        proj1(&rest)
    }
}

/// A symbol of the three-letter alphabet `{0, 1, #}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Hash,
}

impl Symbol {
    pub fn from_char(c: char) -> Result<Self, StringError> {
        match c {
            '0' => Ok(Symbol::Zero),
            '1' => Ok(Symbol::One),
            '#' => Ok(Symbol::Hash),
            other => Err(StringError::BadSymbol(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Hash => '#',
        }
    }
}

pub fn parse_symbols(s: &str) -> Result<Vec<Symbol>, StringError> {
    s.chars().map(Symbol::from_char).collect()
}

pub fn symbols_to_string(s: &[Symbol]) -> String {
    s.iter().map(|c| c.to_char()).collect()
}

/// 0 ↦ 00, 1 ↦ 01, # ↦ 11.
pub fn encode_hash_alphabet(s: &[Symbol]) -> BitString {
    let mut out = Vec::with_capacity(2 * s.len());
    for sym in s {
        let (a, b) = match sym {
            Symbol::Zero => (false, false),
            Symbol::One => (false, true),
            Symbol::Hash => (true, true),
        };
        out.push(a);
        out.push(b);
    }
    BitString(out)
}

pub fn decode_hash_alphabet(b: &BitString) -> Result<Vec<Symbol>, StringError> {
    let bits = b.bits();
    if !bits.len().is_multiple_of(2) {
        return Err(StringError::MalformedEncoding("odd length"));
    }
    bits.chunks(2)
        .map(|pair| match (pair[0], pair[1]) {
            (false, false) => Ok(Symbol::Zero),
            (false, true) => Ok(Symbol::One),
            (true, true) => Ok(Symbol::Hash),
            (true, false) => Err(StringError::MalformedEncoding("\"10\" digraph")),
        })
        .collect()
}

/// Plain bits lifted into the `#`-alphabet.
pub fn bits_to_symbols(b: &BitString) -> Vec<Symbol> {
    b.bits().iter().map(|&x| if x { Symbol::One } else { Symbol::Zero }).collect()
}

/// Inverse of [`bits_to_symbols`]; `None` if a `#` occurs.
pub fn symbols_to_bits(s: &[Symbol]) -> Option<BitString> {
    s.iter()
        .map(|sym| match sym {
            Symbol::Zero => Some(false),
            Symbol::One => Some(true),
            Symbol::Hash => None,
        })
        .collect::<Option<Vec<_>>>()
        .map(BitString)
}
