//! Seeded random cases and constant fitting for experiments.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operators::triple;
use crate::otm::{metrics, FiniteTable, Oracle, OracleError, Trace};
use crate::sopoly::{Sop, UnaryPolynomial};
use crate::strings::BitString;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut impl Rng, max_len: usize) -> BitString {
    let n = rng.gen_range(0..=max_len);
    random_bits_exact(rng, n)
}

pub fn random_bits_exact(rng: &mut impl Rng, n: usize) -> BitString {
    BitString::from_bits((0..n).map(|_| rng.gen_bool(0.5)).collect())
}

fn fnv1a(seed: u64, q: &BitString) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for &b in q.bits() {
        h ^= u64::from(b) + 1;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^= q.len() as u64;
    h.wrapping_mul(0x0100_0000_01b3)
}

/// Deterministic pseudo-random total function with answers of length `≤ max_len`.
pub fn hash_oracle(seed: u64, max_len: usize) -> Oracle {
    Oracle::func(format!("hash({seed},{max_len})"), move |q| {
        let mut r = rng(fnv1a(seed, q));
        Ok(random_bits(&mut r, max_len))
    })
}

/// Wraps `o` and records every query with its answer.
pub fn recording(o: Oracle) -> (Oracle, Arc<Mutex<BTreeMap<BitString, BitString>>>) {
    let log = Arc::new(Mutex::new(BTreeMap::new()));
    let seen = log.clone();
    let wrapped = Oracle::func(format!("recording({})", o.descriptor()), move |q| {
        let a = o.answer(q)?;
        seen.lock().expect("recorder").insert(q.clone(), a.clone());
        Ok(a)
    });
    (wrapped, log)
}

/// Runs `f` against `o` and freezes the queries it made into a table with default ε.
pub fn materialize<T>(
    o: Oracle,
    f: impl FnOnce(&Oracle) -> Result<T, OracleError>,
) -> Result<(FiniteTable, T), OracleError> {
    let (rec, log) = recording(o);
    let out = f(&rec)?;
    let entries = std::mem::take(&mut *log.lock().expect("recorder"));
    let mut t = FiniteTable::new(BitString::empty());
    for (q, a) in entries {
        t = t.with(q, a);
    }
    Ok((t, out))
}

/// Random table on all strings of length `≤ dom`, answers of length `≤ ans`;
/// each string is kept with probability `density`.
pub fn random_table(rng: &mut impl Rng, dom: usize, ans: usize, density: f64) -> FiniteTable {
    let mut t = FiniteTable::new(random_bits(rng, ans.min(2)));
    for q in BitString::all_up_to(dom) {
        if rng.gen_bool(density) {
            t = t.with(q, random_bits(rng, ans));
        }
    }
    t
}

/// Limited-recursion instance: `ψ` answers binary queries `⟨x, y⟩`.
#[derive(Clone)]
pub struct RecCase {
    pub psi: Oracle,
    pub a: BitString,
    pub b: BitString,
    pub c: BitString,
}

impl RecCase {
    pub fn input(&self) -> BitString {
        triple(&self.a, &self.b, &self.c)
    }

    pub fn table(&self) -> &FiniteTable {
        match &self.psi {
            Oracle::Table(t) => t,
            _ => unreachable!("rec cases use tables"),
        }
    }
}

/// `count` recursion cases with components of length `≤ max_size`, each ψ a
/// finite table covering the queries of the reference computation.
pub fn rec_corpus(seed: u64, count: usize, max_size: usize) -> Vec<RecCase> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let a = random_bits(&mut r, max_size);
            let b = random_bits(&mut r, max_size);
            let c = random_bits(&mut r, max_size);
            let h = hash_oracle(r.gen(), b.len() + 3);
            let (table, _) = materialize(h, |o| crate::operators::r_operator(o, &triple(&a, &b, &c)))
                .expect("hash oracles are total");
            RecCase { psi: Oracle::Table(table), a, b, c }
        })
        .collect()
}

/// Unary-oracle instance.
#[derive(Clone)]
pub struct UnaryCase {
    pub phi: Oracle,
    pub a: BitString,
}

impl UnaryCase {
    pub fn table(&self) -> &FiniteTable {
        match &self.phi {
            Oracle::Table(t) => t,
            _ => unreachable!("unary cases use tables"),
        }
    }
}

/// Tables on strings of length `≤ 4` with answers of length `≤ 6`; inputs of length `≤ max_input`.
pub fn unary_corpus(seed: u64, count: usize, max_input: usize) -> Vec<UnaryCase> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let density = r.gen_range(0.3..1.0);
            let phi = Oracle::Table(random_table(&mut r, 4, 6, density));
            let a = random_bits(&mut r, max_input);
            UnaryCase { phi, a }
        })
        .collect()
}

/// Smallest integer `c ≥ 1` with `steps ≤ c · shape` on every sample.
pub fn fit_constant(samples: impl IntoIterator<Item = (u64, BigUint)>) -> u64 {
    samples
        .into_iter()
        .map(|(steps, shape)| {
            let shape = shape.max(BigUint::from(1u8));
            let c = (BigUint::from(steps) + &shape - BigUint::from(1u8)) / shape;
            c.to_u64().unwrap_or(u64::MAX)
        })
        .max()
        .unwrap_or(1)
        .max(1)
}

/// `p(n) = c·(n+1)^d` with the least `c` covering `steps ≤ p(m)` on every trace.
pub fn fit_power(traces: &[&Trace], d: u32) -> UnaryPolynomial {
    let shape = UnaryPolynomial::scaled_shifted_power(1, d);
    let c = fit_constant(traces.iter().map(|t| (t.steps, shape.eval(&BigUint::from(metrics(t).m)))));
    UnaryPolynomial::scaled_shifted_power(c, d)
}

/// `c · shape`.
pub fn scaled(c: u64, shape: &Sop) -> Sop {
    Sop::times(Sop::constant(c), shape.clone())
}
