//! Splitting a machine with finite lookahead revision into two machines with
//! finite length revision.
//!
//! Messages from `M̃` to `N` are strings over `{0,1,#}` in the two-symbol
//! encoding (`0 ↦ 00`, `1 ↦ 01`, `# ↦ 11`). Because `dbl(x)·11·y = ⟨x, y⟩`,
//! splitting at the first `#` is a projection, which the generated code uses
//! throughout:
//!
//! * `v` (no `#`): `M` halted with output `v`;
//! * `d#1^j`: the query `d` got an answer above the watermark and `|d|` is
//!   below the padding length, so `j` pads the message to a fixed length;
//! * `d##1^k`: as above but `d` is at least as long as the padding; `k` is the
//!   largest answer `M` had seen (at least `|a|`).

use std::sync::Arc;

use super::builder::{decode_bits, embed, encode_bits, encoded_ones, query_size_bound, unary_poly, Builder};
use crate::otm::{run, Instr, Machine, Oracle, OracleError, Reg, RunError, Trace};
use crate::sopoly::UnaryPolynomial;
use crate::strings::{decode_hash_alphabet, encode_hash_alphabet, pair, symbols_to_bits, BitString, Symbol};

/// Decoded `M̃` output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Value(BitString),
    Retry { query: BitString, padding: usize },
    Grow { query: BitString, largest: usize },
}

impl Message {
    pub fn encode(&self) -> BitString {
        let ones = |n| vec![Symbol::One; n];
        let sym = |b: &BitString| crate::strings::bits_to_symbols(b);
        let s = match self {
            Message::Value(v) => sym(v),
            Message::Retry { query, padding } => [sym(query), vec![Symbol::Hash], ones(*padding)].concat(),
            Message::Grow { query, largest } => {
                [sym(query), vec![Symbol::Hash, Symbol::Hash], ones(*largest)].concat()
            }
        };
        encode_hash_alphabet(&s)
    }

    pub fn decode(b: &BitString) -> Option<Message> {
        let s = decode_hash_alphabet(b).ok()?;
        let mut parts = s.split(|x| *x == Symbol::Hash);
        let head = symbols_to_bits(parts.next()?)?;
        let rest: Vec<&[Symbol]> = parts.collect();
        match rest.as_slice() {
            [] => Some(Message::Value(head)),
            [tail] => Some(Message::Retry { query: head, padding: tail.len() }),
            [[], tail] => Some(Message::Grow { query: head, largest: tail.len() }),
            _ => None,
        }
    }
}

/// `M̃` input `⟨a, enc(c#1^j)⟩`.
pub fn mtilde_input(a: &BitString, prime: &BitString, padding: usize) -> BitString {
    let mut s = crate::strings::bits_to_symbols(prime);
    s.push(Symbol::Hash);
    s.extend(std::iter::repeat_n(Symbol::One, padding));
    pair(a, &encode_hash_alphabet(&s))
}

pub struct Factorization {
    pub mtilde: Machine,
    pub n: Machine,
    pub p: UnaryPolynomial,
    pub r: usize,
}

/// `M̃` on `⟨a, b⟩` with `b = enc(c#c′)`: query `c` and ignore the answer, then
/// run `M` on `a` against the watermark `max(|⟨a,b⟩|, |φ(c)|)`, reporting the
/// first answer above it as a message instead of continuing.
fn build_mtilde(m: &Machine) -> Machine {
    let mut b = Builder::new();
    let offset = b.block(m.register_count());
    let [a, enc, c, rest, check, c2, wm, most, saved, out, t1, t2, empty] = [(); 13].map(|_| b.reg());
    let fail = "malformed";

    b.clear(empty);
    b.op(Instr::Proj1(Reg(0), a));
    b.op(Instr::Proj2(Reg(0), enc));
    b.op(Instr::Proj1(enc, c));
    b.op(Instr::Proj2(enc, rest));
    b.op(Instr::Pair(c, rest, check));
    let split = b.fresh("split");
    b.op(Instr::Jeq(check, enc, split.clone()));
    b.jmp(fail);
    b.place(&split);
    // `c` itself must be #-free: it was produced by projecting `dbl(c)·11·…`,
    // and `rest` must be a #-free encoding too.
    decode_bits(&mut b, rest, empty, c2, fail);
    b.op(Instr::Query(c, t1));
    b.op(Instr::LenU(Reg(0), wm));
    let keep = b.fresh("keep");
    b.op(Instr::Jle(t1, wm, keep.clone()));
    b.op(Instr::LenU(t1, wm));
    b.place(&keep);
    b.op(Instr::LenU(a, most));
    b.op(Instr::Copy(a, Reg(offset)));

    embed(&mut b, m, "m", offset, |b, op| match op {
        Instr::Query(s, d) => {
            let (seen, within, grow) = (b.fresh("seen"), b.fresh("within"), b.fresh("grow"));
            b.op(Instr::Copy(s, saved));
            b.op(Instr::Query(s, d));
            b.op(Instr::Jle(d, most, seen.clone()));
            b.op(Instr::LenU(d, most));
            b.place(&seen);
            b.op(Instr::Jle(d, wm, within.clone()));
            b.op(Instr::Jle(c2, saved, grow.clone()));
            // d # 1^{|c′| − |d|}
            let (top, done) = (b.fresh("pad"), b.fresh("pad_done"));
            b.op(Instr::Copy(c2, t1));
            b.op(Instr::Copy(saved, t2));
            b.place(&top);
            b.op(Instr::Jz(t2, done.clone()));
            b.op(Instr::DropLast(t1));
            b.op(Instr::DropLast(t2));
            b.jmp(&top);
            b.place(&done);
            encoded_ones(b, t1, t2);
            b.op(Instr::Pair(saved, t2, out));
            b.op(Instr::Halt(out));
            // d ## 1^k
            b.place(&grow);
            encoded_ones(b, most, t2);
            b.op(Instr::Pair(empty, t2, t1));
            b.op(Instr::Pair(saved, t1, out));
            b.op(Instr::Halt(out));
            b.place(&within);
        }
        Instr::Halt(r) => {
            encode_bits(b, r, empty, out);
            b.op(Instr::Halt(out));
        }
        other => b.op(other),
    });

    b.place(fail);
    b.op(Instr::Halt(empty));
    b.finish(format!("{}_tilde", m.name()))
}

/// `N` on `a`: repeatedly ask `⟨a, enc(D#1^{q(base)})⟩` and act on the reply.
/// `q(x) = x + 2p(x) + 1` bounds the queries `M` can pose while its answers
/// stay `≤ x`. Gives ε after more than `2r + 1` length revisions, on a
/// malformed reply, or on a `##` reply that does not raise `base`.
fn build_n(p: &UnaryPolynomial, r: usize) -> Machine {
    let q = query_size_bound(p);
    let mut b = Builder::new();
    let [base, pad, prime, dpad, msg, query, ans, revs, cap, best, have, value, d, rest, tail, rest2, check, empty] =
        [(); 18].map(|_| b.reg());
    let fail = "give_up";
    let top = "ask";

    b.clear(empty);
    b.op(Instr::LenU(Reg(0), base));
    unary_poly(&mut b, &q, base, pad);
    b.clear(prime);
    b.clear(revs);
    b.clear(have);
    b.op(Instr::Const(cap, BitString::ones(2 * r + 1)));

    b.place(top);
    encoded_ones(&mut b, pad, dpad);
    b.op(Instr::Pair(prime, dpad, msg));
    b.op(Instr::Pair(Reg(0), msg, query));
    b.op(Instr::Query(query, ans));

    // length-revision bookkeeping
    let (revised, quiet, record) = (b.fresh("revised"), b.fresh("quiet"), b.fresh("record"));
    b.op(Instr::Jle(ans, Reg(0), quiet.clone()));
    b.op(Instr::Jz(have, revised.clone()));
    b.op(Instr::Jle(ans, best, quiet.clone()));
    b.place(&revised);
    b.op(Instr::AppendBit(true, revs));
    b.op(Instr::Jle(revs, cap, quiet.clone()));
    b.jmp(fail);
    b.place(&quiet);
    let classify = b.fresh("classify");
    b.op(Instr::Jz(have, record.clone()));
    b.op(Instr::Jle(ans, best, classify.clone()));
    b.place(&record);
    b.op(Instr::Copy(ans, best));
    b.op(Instr::Const(have, BitString::ones(1)));
    b.place(&classify);

    // value?
    let not_value = b.fresh("not_value");
    decode_bits(&mut b, ans, empty, value, &not_value);
    b.op(Instr::Halt(value));
    b.place(&not_value);
    b.op(Instr::Proj1(ans, d));
    b.op(Instr::Proj2(ans, rest));
    b.op(Instr::Pair(d, rest, check));
    let split = b.fresh("split");
    b.op(Instr::Jeq(check, ans, split.clone()));
    b.jmp(fail);
    b.place(&split);
    let double = b.fresh("double");
    decode_bits(&mut b, rest, empty, tail, &double);
    b.op(Instr::Copy(d, prime));
    b.jmp(top);

    b.place(&double);
    b.op(Instr::Proj2(rest, rest2));
    b.op(Instr::Pair(empty, rest2, check));
    let grow = b.fresh("grow");
    b.op(Instr::Jeq(check, rest, grow.clone()));
    b.jmp(fail);
    b.place(&grow);
    decode_bits(&mut b, rest2, empty, tail, fail);
    b.op(Instr::Jle(tail, base, fail.to_string()));
    b.op(Instr::LenU(tail, base));
    unary_poly(&mut b, &q, base, pad);
    b.clear(prime);
    b.jmp(top);

    b.place(fail);
    b.op(Instr::Halt(empty));
    b.finish("N")
}

/// Factors `m` (plain step-count `p`, at most `r` lookahead revisions) into
/// `(M̃, N)` with `N ∘ M̃ = m`.
pub fn factorize(m: &Machine, p: &UnaryPolynomial, r: usize) -> Factorization {
    Factorization {
        mtilde: build_mtilde(m),
        n: build_n(p, r).with_name(format!("{}_N", m.name())),
        p: p.clone(),
        r,
    }
}

/// The oracle `x ↦ M̃(φ)(x)`.
pub fn mtilde_oracle(mtilde: Arc<Machine>, phi: Oracle, fuel: u64) -> Oracle {
    let name = format!("run({})", mtilde.name());
    Oracle::func(name, move |x| {
        run(&mtilde, &phi, x, fuel).map(|t| t.output).map_err(|e| OracleError::Nested(Box::new(e)))
    })
}

/// Runs `N` against `M̃(φ)` on `a`; returns `N`'s trace and every `M̃` trace in order.
pub fn run_factored(
    f: &Factorization,
    phi: &Oracle,
    a: &BitString,
    fuel: u64,
) -> Result<(Trace, Vec<Trace>), RunError> {
    let inner = std::sync::Mutex::new(Vec::new());
    let mtilde = &f.mtilde;
    let mut port = |x: &BitString| match run(mtilde, phi, x, fuel) {
        Ok(t) => {
            let out = t.output.clone();
            inner.lock().expect("no poisoning").push(t);
            Ok(out)
        }
        Err(e) => Err(OracleError::Nested(Box::new(e))),
    };
    let outer = crate::otm::run_with_port(&f.n, &mut port, a, fuel)?;
    Ok((outer, inner.into_inner().expect("no poisoning")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_prefix_max_machine, build_selfcomp_machine};
    use crate::otm::{metrics, FiniteTable};
    use crate::strings::bits;

    #[test]
    fn message_codec() {
        let cases = [
            Message::Value(bits("0110")),
            Message::Value(bits("")),
            Message::Retry { query: bits("10"), padding: 3 },
            Message::Grow { query: bits("111"), largest: 2 },
        ];
        for m in cases {
            assert_eq!(Message::decode(&m.encode()), Some(m));
        }
        let retry = Message::Retry { query: bits("10"), padding: 3 };
        assert_eq!(retry.encode().len(), 2 * (2 + 1 + 3));
        assert_eq!(Message::decode(&bits("10")), None);
    }

    #[test]
    fn mtilde_rejects_missing_hash() {
        let f = factorize(&build_selfcomp_machine(), &"3".parse().unwrap(), 2);
        let o = Oracle::Rule(crate::otm::BuiltinRule::Identity);
        let no_hash = pair(&bits("1"), &encode_hash_alphabet(&[Symbol::One, Symbol::Zero]));
        assert_eq!(run(&f.mtilde, &o, &no_hash, 100_000).unwrap().output, bits(""));
        let two_hashes = pair(&bits("1"), &encode_hash_alphabet(&[Symbol::Hash, Symbol::One, Symbol::Hash]));
        assert_eq!(run(&f.mtilde, &o, &two_hashes, 100_000).unwrap().output, bits(""));
        assert_eq!(run(&f.mtilde, &o, &bits("0"), 100_000).unwrap().output, bits(""));
    }

    #[test]
    fn mtilde_messages() {
        let f = factorize(&build_selfcomp_machine(), &"3".parse().unwrap(), 2);
        // φ(1) = 0^20 exceeds the watermark of a short input.
        let o = Oracle::Table(FiniteTable::new(bits("")).with(bits("1"), BitString::zeros(20)));
        let out = run(&f.mtilde, &o, &mtilde_input(&bits("1"), &bits(""), 4), 100_000).unwrap();
        let msg = Message::decode(&out.output).unwrap();
        assert_eq!(msg, Message::Retry { query: bits("1"), padding: 3 });
        let out = run(&f.mtilde, &o, &mtilde_input(&bits("1"), &bits(""), 1), 100_000).unwrap();
        assert_eq!(Message::decode(&out.output).unwrap(), Message::Grow { query: bits("1"), largest: 20 });
        // Priming with the offending query lets the run finish.
        let out = run(&f.mtilde, &o, &mtilde_input(&bits("1"), &bits("1"), 4), 100_000).unwrap();
        assert_eq!(Message::decode(&out.output).unwrap(), Message::Value(bits("")));
    }

    #[test]
    fn composition_matches_prefix_max() {
        let m = build_prefix_max_machine();
        let f = factorize(&m, &"6n^2+12n+6".parse().unwrap(), 1);
        let o = Oracle::Table(
            FiniteTable::new(bits("1"))
                .with(bits(""), bits("11"))
                .with(bits("0"), BitString::zeros(9))
                .with(bits("01"), BitString::zeros(30)),
        );
        for a in ["", "0", "01", "011", "1"] {
            let a = bits(a);
            let (outer, inner) = run_factored(&f, &o, &a, 10_000_000).unwrap();
            let direct = run(&m, &o, &a, 100_000).unwrap();
            assert_eq!(outer.output, direct.output, "a={a}");
            assert!(metrics(&outer).length_revisions <= 3);
            for t in inner {
                assert!(metrics(&t).length_revisions <= 2);
            }
        }
    }
}
