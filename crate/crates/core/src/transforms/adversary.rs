use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::otm::oracle::DecimalLen;
use crate::otm::{run, BuiltinRule, Machine, Oracle, RunError};
use crate::sopoly::UnaryPolynomial;
use crate::strings::BitString;

/// Largest `m` the filr search will consider.
pub const FILR_M_CAP: usize = 512;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("no admissible m up to {0}")]
    Infeasible(usize),
    #[error("run against psi_{index} failed: {source}")]
    Run { index: usize, source: RunError },
    #[error("no admissible string of length {m} for a_{index}")]
    Exhausted { m: usize, index: usize },
}

/// `φ_n(0) = 0^{t(n)+1}`, `φ_n(0^{t^k(n)+1}) = 0^{t^{k+1}(n)+1}`, otherwise ε.
pub fn iteration_adversary(t: &UnaryPolynomial, n: u64) -> Oracle {
    Oracle::Rule(BuiltinRule::Iteration { t: t.clone(), n })
}

/// `φ(0^n) = 0^{2k−n}` for `n ≤ k`, otherwise ε.
pub fn selfcomp_adversary(k: usize) -> Oracle {
    Oracle::Rule(BuiltinRule::Selfcomp { k })
}

/// How `ψ_i` maps `a_j` and the long all-ones queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilrReading {
    /// `a_j ↦ 1^{(p+1)^{j-1}(m)}` and `1^{(p+1)^{j-1}(m)} ↦ a_j` for `j ≥ 2`.
    #[default]
    Literal,
    /// `a_j ↦ 1^{(p+1)^j(m)}` and `1^{(p+1)^{j-1}(m)} ↦ a_j` for `j ≥ 2`.
    Chained,
}

pub struct FilrAdversary {
    /// `ψ_0, …, ψ_k`
    pub oracles: Vec<Oracle>,
    /// `a_1, …, a_k`
    pub strings: Vec<BitString>,
    pub m: usize,
    /// Length of `ψ_k(a_j)` for `j = 1..k`.
    pub lengths: Vec<BigUint>,
    pub reading: FilrReading,
}

fn iterate_succ(p: &UnaryPolynomial, times: usize, x: &BigUint) -> BigUint {
    let mut v = x.clone();
    for _ in 0..times {
        v = p.eval(&v) + BigUint::one();
    }
    v
}

/// Smallest `m > p(k)` with `(p+1)^k(m) < 2^m − k − 2`.
pub fn filr_adversary_m(p: &UnaryPolynomial, k: usize, cap: usize) -> Result<usize, AdversaryError> {
    let lower = p.eval(&BigUint::from(k)).to_usize().unwrap_or(usize::MAX);
    let start = lower.saturating_add(1);
    for m in start..=cap {
        let lhs = iterate_succ(p, k, &BigUint::from(m)) + BigUint::from(k + 2);
        if lhs < (BigUint::one() << m) {
            return Ok(m);
        }
    }
    Err(AdversaryError::Infeasible(cap))
}

fn psi(strings: &[BitString], lengths: &[BigUint], reading: FilrReading) -> Oracle {
    if strings.is_empty() {
        return Oracle::Rule(BuiltinRule::Empty);
    }
    Oracle::Rule(BuiltinRule::FilrPsi {
        strings: strings.to_vec(),
        lengths: lengths[..strings.len()].iter().cloned().map(DecimalLen).collect(),
        chained: reading == FilrReading::Chained,
    })
}

/// Lexicographically first string of length `m` containing a 0 and outside `avoid`.
fn first_candidate(m: usize, avoid: &[&BitString]) -> Option<BitString> {
    // Only strings of length m matter; scan m-bit counters from 0.
    let blocked: std::collections::BTreeSet<&BitString> =
        avoid.iter().copied().filter(|s| s.len() == m).collect();
    let limit = if m >= 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut x = 0u64;
    while x < limit {
        let s = BitString::from_bits((0..m).map(|i| i + 64 >= m && (x >> (m - 1 - i)) & 1 == 1).collect());
        if !blocked.contains(&s) {
            return Some(s);
        }
        x += 1;
    }
    None
}

/// The oracle family `ψ_0, …, ψ_k` built against `m` on input `1^k`, with each
/// `a_j` chosen as the lexicographically first admissible string.
pub fn filr_adversary(
    machine: &Machine,
    p: &UnaryPolynomial,
    k: usize,
    fuel: u64,
) -> Result<FilrAdversary, AdversaryError> {
    filr_adversary_with(machine, p, k, fuel, FilrReading::Literal)
}

pub fn filr_adversary_with(
    machine: &Machine,
    p: &UnaryPolynomial,
    k: usize,
    fuel: u64,
    reading: FilrReading,
) -> Result<FilrAdversary, AdversaryError> {
    let m = filr_adversary_m(p, k, FILR_M_CAP)?;
    let shift = usize::from(reading == FilrReading::Chained);
    let lengths: Vec<BigUint> = (0..k).map(|j| iterate_succ(p, j + shift, &BigUint::from(m))).collect();
    let input = BitString::ones(k);
    let all_ones = BitString::ones(m);
    let mut strings: Vec<BitString> = Vec::new();
    let mut oracles = vec![psi(&[], &lengths, reading)];
    for j in 0..k {
        let trace = run(machine, &oracles[j], &input, fuel)
            .map_err(|source| AdversaryError::Run { index: j, source })?;
        let mut avoid: Vec<&BitString> = trace.events.iter().map(|e| &e.query).collect();
        avoid.extend(strings.iter());
        avoid.push(&all_ones);
        avoid.push(&trace.output);
        let next = first_candidate(m, &avoid).ok_or(AdversaryError::Exhausted { m, index: j + 1 })?;
        strings.push(next);
        oracles.push(psi(&strings, &lengths, reading));
    }
    Ok(FilrAdversary { oracles, strings, m, lengths, reading })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::bits;

    #[test]
    fn iteration_case_split() {
        let o = iteration_adversary(&"n+1".parse().unwrap(), 2);
        assert_eq!(o.answer(&bits("0")).unwrap(), BitString::zeros(4));
        assert_eq!(o.answer(&BitString::zeros(4)).unwrap(), BitString::zeros(5));
        assert_eq!(o.answer(&BitString::zeros(5)).unwrap(), BitString::zeros(6));
        assert_eq!(o.answer(&bits("11")).unwrap(), bits(""));
        assert_eq!(o.answer(&bits("")).unwrap(), bits(""));
        assert_eq!(o.answer(&bits("00")).unwrap(), bits(""));
    }

    #[test]
    fn selfcomp_values() {
        let o = selfcomp_adversary(2);
        assert_eq!(o.answer(&bits("")).unwrap(), bits("0000"));
        assert_eq!(o.answer(&bits("0")).unwrap(), bits("000"));
        assert_eq!(o.answer(&bits("00")).unwrap(), bits("00"));
        assert_eq!(o.answer(&bits("1")).unwrap(), bits(""));
    }

    #[test]
    fn smallest_m_for_square() {
        assert_eq!(filr_adversary_m(&"n^2".parse().unwrap(), 2, 512).unwrap(), 17);
    }

    #[test]
    fn psi_zero_is_constant_empty() {
        let m = crate::operators::build_filr_machine();
        let adv = filr_adversary(&m, &"n^2+7n+6".parse().unwrap(), 1, 1_000_000).unwrap();
        for q in ["", "0", "111"] {
            assert_eq!(adv.oracles[0].answer(&bits(q)).unwrap(), bits(""));
        }
        let a1 = &adv.strings[0];
        assert_eq!(a1.len(), adv.m);
        assert_eq!(adv.oracles[1].answer(&bits("")).unwrap(), *a1);
        assert_eq!(adv.oracles[1].answer(a1).unwrap(), BitString::ones(adv.m));
    }

    #[test]
    fn candidates_are_lexicographic() {
        let z = bits("000");
        let one = bits("001");
        assert_eq!(first_candidate(3, &[]), Some(bits("000")));
        assert_eq!(first_candidate(3, &[&z, &one]), Some(bits("010")));
        let all: Vec<BitString> = BitString::all_of_length(2).collect();
        let refs: Vec<&BitString> = all.iter().collect();
        assert_eq!(first_candidate(2, &refs), None);
    }
}
