use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::interp::RunError;
use crate::sopoly::{SizeFunction, UnaryPolynomial};
use crate::strings::BitString;

/// Default cap on `n` for exhaustive enumeration of `{0,1}^{≤n}`.
pub const ENUMERATION_CAP: usize = 20;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle answer of length {0} is too large to materialize")]
    TooLarge(BigUint),
    #[error("nested machine run failed: {0}")]
    Nested(Box<RunError>),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("enumeration over strings of length <= {n} refused (cap is {cap})")]
pub struct EnumerationRefused {
    pub n: usize,
    pub cap: usize,
}

/// Finite table with a default answer.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteTable {
    #[serde(default)]
    pub default: BitString,
    #[serde(default)]
    pub entries: BTreeMap<BitString, BitString>,
}

impl FiniteTable {
    pub fn new(default: BitString) -> Self {
        FiniteTable { default, entries: BTreeMap::new() }
    }

    pub fn with(mut self, query: BitString, answer: BitString) -> Self {
        self.entries.insert(query, answer);
        self
    }

    pub fn lookup(&self, q: &BitString) -> &BitString {
        self.entries.get(q).unwrap_or(&self.default)
    }

    /// `|φ|(n)` in closed form: keys of length ≤ n plus the default whenever
    /// some string of length ≤ n is not a key.
    pub fn size_at(&self, n: usize) -> usize {
        let mut best = 0;
        let mut keys = 0u128;
        for (k, v) in &self.entries {
            if k.len() <= n {
                keys += 1;
                best = best.max(v.len());
            }
        }
        let total = if n >= 127 { u128::MAX } else { (1u128 << (n + 1)) - 1 };
        if keys < total {
            best = best.max(self.default.len());
        }
        best
    }

    /// Largest answer length anywhere in the table.
    pub fn max_answer(&self) -> usize {
        self.entries.values().map(BitString::len).chain([self.default.len()]).max().unwrap_or(0)
    }

    pub fn size_function(&self) -> TableSize<'_> {
        TableSize(self)
    }
}

/// Exact size function of a finite table.
pub struct TableSize<'a>(&'a FiniteTable);

impl SizeFunction for TableSize<'_> {
    fn size(&self, n: &BigUint) -> BigUint {
        let n = n.to_usize().unwrap_or(usize::MAX);
        BigUint::from(self.0.size_at(n))
    }
}

/// `|φ|(n) = max_{|a| ≤ n} |φ(a)|` by exhaustive enumeration.
pub fn oracle_size(table: &FiniteTable, n: usize) -> Result<usize, EnumerationRefused> {
    oracle_size_capped(table, n, ENUMERATION_CAP)
}

pub fn oracle_size_capped(table: &FiniteTable, n: usize, cap: usize) -> Result<usize, EnumerationRefused> {
    if n > cap {
        return Err(EnumerationRefused { n, cap });
    }
    Ok(BitString::all_up_to(n).map(|a| table.lookup(&a).len()).max().unwrap_or(0))
}

/// Arbitrary-precision length stored as a decimal string in JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalLen(pub BigUint);

impl Serialize for DecimalLen {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for DecimalLen {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<BigUint>().map(DecimalLen).map_err(serde::de::Error::custom)
    }
}

/// Named total rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuiltinRule {
    /// constantly ε
    Empty,
    Identity,
    /// `a ↦ aa`
    Doubling,
    /// `a ↦ a·1`
    AppendOne,
    /// Lookahead-forcing oracle for the iteration operator: `0 ↦ 0^{t(n)+1}`,
    /// `0^{t^k(n)+1} ↦ 0^{t^{k+1}(n)+1}`, otherwise ε.
    Iteration {
        t: UnaryPolynomial,
        n: u64,
    },
    /// `0^j ↦ 0^{2k−j}` for `j ≤ k`, otherwise ε.
    Selfcomp {
        k: usize,
    },
    /// Adversarial family member `ψ_i` with `strings = [a_1..a_i]` and
    /// `lengths[j-1] = (p+1)^{j-1}(m)`: `a_j ↦ 1^{lengths[j-1]}` and
    /// `1^{lengths[j-1]} ↦ a_j` for `j ≥ 2`. With `chained`, the reverse map is
    /// `1^{lengths[j-2]} ↦ a_j` instead, so answers lead on to the next string.
    FilrPsi {
        strings: Vec<BitString>,
        lengths: Vec<DecimalLen>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        chained: bool,
    },
}

impl BuiltinRule {
    pub fn by_name(name: &str) -> Option<BuiltinRule> {
        Some(match name {
            "empty" => BuiltinRule::Empty,
            "identity" => BuiltinRule::Identity,
            "doubling" => BuiltinRule::Doubling,
            "append_one" => BuiltinRule::AppendOne,
            _ => return None,
        })
    }

    pub fn answer(&self, q: &BitString) -> Result<BitString, OracleError> {
        Ok(match self {
            BuiltinRule::Empty => BitString::empty(),
            BuiltinRule::Identity => q.clone(),
            BuiltinRule::Doubling => q.concat(q),
            BuiltinRule::AppendOne => {
                let mut a = q.clone();
                a.push(true);
                a
            }
            BuiltinRule::Iteration { t, n } => iteration_answer(t, *n, q)?,
            BuiltinRule::Selfcomp { k } => {
                let j = q.len();
                if q.is_all_zeros() && j <= *k {
                    BitString::zeros(2 * k - j)
                } else {
                    BitString::empty()
                }
            }
            BuiltinRule::FilrPsi { strings, lengths, chained } => {
                filr_psi_answer(strings, lengths, *chained, q)?
            }
        })
    }
}

fn materialize_zeros(len: &BigUint) -> Result<BitString, OracleError> {
    len.to_usize()
        .filter(|l| *l <= 1 << 28)
        .map(BitString::zeros)
        .ok_or_else(|| OracleError::TooLarge(len.clone()))
}

fn iteration_answer(t: &UnaryPolynomial, n: u64, q: &BitString) -> Result<BitString, OracleError> {
    if q.is_empty() || !q.is_all_zeros() {
        return Ok(BitString::empty());
    }
    let len = BigUint::from(q.len());
    let one = BigUint::one();
    if q.len() == 1 {
        return materialize_zeros(&(t.eval_u64(n) + &one));
    }
    // Walk t^k(n) until it reaches |q| - 1; t is strictly increasing.
    let target = &len - &one;
    let mut x = BigUint::from(n);
    loop {
        if x == target {
            return materialize_zeros(&(t.eval(&x) + &one));
        }
        if x > target {
            return Ok(BitString::empty());
        }
        let next = t.eval(&x);
        if next <= x {
            return Ok(BitString::empty());
        }
        x = next;
    }
}

fn filr_psi_answer(
    strings: &[BitString],
    lengths: &[DecimalLen],
    chained: bool,
    q: &BitString,
) -> Result<BitString, OracleError> {
    if strings.is_empty() {
        return Ok(BitString::empty());
    }
    if q.is_empty() {
        return Ok(strings[0].clone());
    }
    if let Some(j) = strings.iter().position(|a| a == q) {
        let len = &lengths[j].0;
        return len
            .to_usize()
            .filter(|l| *l <= 1 << 28)
            .map(BitString::ones)
            .ok_or_else(|| OracleError::TooLarge(len.clone()));
    }
    if q.bits().iter().all(|b| *b) {
        let qlen = BigUint::from(q.len());
        for j in 1..strings.len() {
            let len = if chained { &lengths[j - 1] } else { &lengths[j] };
            if len.0 == qlen {
                return Ok(strings[j].clone());
            }
        }
    }
    Ok(BitString::empty())
}

type OracleFn = dyn Fn(&BitString) -> Result<BitString, OracleError> + Send + Sync;

/// A total map from bit strings to bit strings.
#[derive(Clone)]
pub enum Oracle {
    Table(FiniteTable),
    Rule(BuiltinRule),
    /// Host-level composite, e.g. an oracle answered by running another machine.
    Func {
        name: String,
        f: Arc<OracleFn>,
    },
}

impl Oracle {
    pub fn table(t: FiniteTable) -> Self {
        Oracle::Table(t)
    }

    pub fn func(
        name: impl Into<String>,
        f: impl Fn(&BitString) -> Result<BitString, OracleError> + Send + Sync + 'static,
    ) -> Self {
        Oracle::Func { name: name.into(), f: Arc::new(f) }
    }

    pub fn answer(&self, q: &BitString) -> Result<BitString, OracleError> {
        match self {
            Oracle::Table(t) => Ok(t.lookup(q).clone()),
            Oracle::Rule(r) => r.answer(q),
            Oracle::Func { f, .. } => f(q),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            Oracle::Table(t) => format!("table({} entries)", t.entries.len()),
            Oracle::Rule(r) => serde_json::to_string(r).unwrap_or_else(|_| "builtin".into()),
            Oracle::Func { name, .. } => name.clone(),
        }
    }

    /// Oracle-file JSON; composites are not serializable.
    pub fn to_json(&self) -> Option<serde_json::Value> {
        match self {
            Oracle::Table(t) => serde_json::to_value(t).ok(),
            Oracle::Rule(r) => serde_json::to_value(r).ok(),
            Oracle::Func { .. } => None,
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Oracle, serde_json::Error> {
        if v.get("builtin").is_some() {
            Ok(Oracle::Rule(serde_json::from_value(v.clone())?))
        } else {
            Ok(Oracle::Table(serde_json::from_value(v.clone())?))
        }
    }
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Oracle({})", self.descriptor())
    }
}
