//! Reference operators and their machine realizations.
//!
//! Multi-argument functionals are presented to a single oracle port through
//! tupling: a binary rule `φ(x, y)` is the oracle `ψ(⟨x, y⟩)`, and string
//! arguments are passed as one right-nested tuple.

use std::sync::Arc;

use crate::otm::interp::{run, RunError, Trace};
use crate::otm::oracle::{Oracle, OracleError};
use crate::otm::{parse_machine_text, Machine};
use crate::strings::{pair, proj1, proj2, tuple_encode, tuple_project, BitString};

/// Prefixes `c^{≤1}, …, c^{≤|c|}` (the empty prefix excluded).
fn proper_steps(c: &BitString) -> impl Iterator<Item = BitString> + '_ {
    (1..=c.len()).map(move |i| c.truncate(i))
}

/// Limited recursion with a fallible step function.
pub fn try_rec_ref<E>(
    mut phi: impl FnMut(&BitString, &BitString) -> Result<BitString, E>,
    a: &BitString,
    b: &BitString,
    c: &BitString,
) -> Result<BitString, E> {
    let mut t = a.clone();
    for ci in proper_steps(c) {
        t = phi(&ci, &t)?.truncate(b.len());
    }
    Ok(t)
}

/// `Rec(φ,a,b,ε) = a`, `Rec(φ,a,b,ci) = φ(ci, Rec(φ,a,b,c))^{≤|b|}`.
pub fn rec_ref(
    phi: impl Fn(&BitString, &BitString) -> BitString,
    a: &BitString,
    b: &BitString,
    c: &BitString,
) -> BitString {
    try_rec_ref::<std::convert::Infallible>(|x, y| Ok(phi(x, y)), a, b, c).unwrap_or_else(|e| match e {})
}

pub fn try_rec_prime_ref<E>(
    mut phi: impl FnMut(&BitString, &BitString) -> Result<BitString, E>,
    a: &BitString,
    mut psi: impl FnMut(&BitString) -> Result<BitString, E>,
    c: &BitString,
) -> Result<BitString, E> {
    let mut t = a.clone();
    for ci in proper_steps(c) {
        let next = phi(&ci, &t)?;
        let cap = psi(&ci)?;
        t = if next.len() <= cap.len() { next } else { cap };
    }
    Ok(t)
}

/// `Rec′`: like `Rec`, but a step result longer than `ψ(ci)` is replaced by `ψ(ci)`.
pub fn rec_prime_ref(
    phi: impl Fn(&BitString, &BitString) -> BitString,
    a: &BitString,
    psi: impl Fn(&BitString) -> BitString,
    c: &BitString,
) -> BitString {
    try_rec_prime_ref::<std::convert::Infallible>(|x, y| Ok(phi(x, y)), a, |x| Ok(psi(x)), c)
        .unwrap_or_else(|e| match e {})
}

/// Driver `𝒯(ψ, a, b, c)`: iterate `t := ψ⟨c^{≤i}, t⟩`, returning ε as soon as `|t| > |b|`.
pub fn t_driver_ref<E>(
    mut psi: impl FnMut(&BitString, &BitString) -> Result<BitString, E>,
    a: &BitString,
    b: &BitString,
    c: &BitString,
) -> Result<BitString, E> {
    let mut t = a.clone();
    for ci in proper_steps(c) {
        let s = psi(&ci, &t)?;
        if s.len() > b.len() {
            return Ok(BitString::empty());
        }
        t = s;
    }
    Ok(t)
}

/// `𝒮(φ, t, b, d) = φ(d, t)^{≤|b|}`.
pub fn s_ref<E>(
    mut phi: impl FnMut(&BitString, &BitString) -> Result<BitString, E>,
    t: &BitString,
    b: &BitString,
    d: &BitString,
) -> Result<BitString, E> {
    Ok(phi(d, t)?.truncate(b.len()))
}

/// Splits `⟨x, ⟨y, z⟩⟩`.
pub fn untriple(t: &BitString) -> (BitString, BitString, BitString) {
    (tuple_project(1, 3, t), tuple_project(2, 3, t), tuple_project(3, 3, t))
}

pub fn triple(x: &BitString, y: &BitString, z: &BitString) -> BitString {
    tuple_encode(&[x.clone(), y.clone(), z.clone()]).expect("three parts")
}

fn binary(psi: &Oracle) -> impl FnMut(&BitString, &BitString) -> Result<BitString, OracleError> + '_ {
    move |x, y| psi.answer(&pair(x, y))
}

/// `R(ψ)(⟨a, b, c⟩) = Rec(λxy.ψ⟨x,y⟩, a, b, c)`.
pub fn r_operator(psi: &Oracle, input: &BitString) -> Result<BitString, OracleError> {
    let (a, b, c) = untriple(input);
    try_rec_ref(binary(psi), &a, &b, &c)
}

/// `𝒮` as an operator on input `⟨t, b, d⟩`.
pub fn s_operator(psi: &Oracle, input: &BitString) -> Result<BitString, OracleError> {
    let (t, b, d) = untriple(input);
    s_ref(binary(psi), &t, &b, &d)
}

/// `𝒯` as an operator on input `⟨a, b, c⟩`.
pub fn t_operator(psi: &Oracle, input: &BitString) -> Result<BitString, OracleError> {
    let (a, b, c) = untriple(input);
    t_driver_ref(binary(psi), &a, &b, &c)
}

/// `F(φ)(a) = φ^{|a|}(0)`.
pub fn iteration_operator(phi: &Oracle, a: &BitString) -> Result<BitString, OracleError> {
    let mut t = BitString::zeros(1);
    for _ in 0..a.len() {
        t = phi.answer(&t)?;
    }
    Ok(t)
}

/// `1^{max_{b⊆a} |φ(b)|}`.
pub fn prefix_max_operator(phi: &Oracle, a: &BitString) -> Result<BitString, OracleError> {
    let mut best = 0;
    for b in a.prefixes() {
        best = best.max(phi.answer(&b)?.len());
    }
    Ok(BitString::ones(best))
}

/// `F_0 = ε`, `F_{n+1} = φ(φ(F_n))^{≤|φ(ε)|}`, `F(φ)(a) = F_{|a|}`.
pub fn filr_operator(phi: &Oracle, a: &BitString) -> Result<BitString, OracleError> {
    let bound = phi.answer(&BitString::empty())?.len();
    let mut f = BitString::empty();
    for _ in 0..a.len() {
        f = phi.answer(&phi.answer(&f)?)?.truncate(bound);
    }
    Ok(f)
}

/// `φ(φ(a))`.
pub fn selfcomp_operator(phi: &Oracle, a: &BitString) -> Result<BitString, OracleError> {
    phi.answer(&phi.answer(a)?)
}

/// `0^{max{|φ(0^n)| : n ≤ |a|}}`.
pub fn zeromax_operator(phi: &Oracle, a: &BitString) -> Result<BitString, OracleError> {
    let mut best = 0;
    for n in 0..=a.len() {
        best = best.max(phi.answer(&BitString::zeros(n))?.len());
    }
    Ok(BitString::zeros(best))
}

/// Comparator `M(ψ, s, t) = s` if `|ψ(s)| > |ψ(t)|`, else `t`.
pub fn argmax_step(psi: &mut impl FnMut(&BitString) -> BitString, s: &BitString, t: &BitString) -> BitString {
    if psi(s).len() > psi(t).len() {
        s.clone()
    } else {
        t.clone()
    }
}

fn load(name: &str, text: &str) -> Machine {
    parse_machine_text(text).unwrap_or_else(|e| panic!("library machine {name}: {e}"))
}

pub const R_SOURCE: &str = include_str!("../machines/R.otm");
pub const S_SOURCE: &str = include_str!("../machines/S.otm");
pub const T_SOURCE: &str = include_str!("../machines/T.otm");
pub const ITERATION_SOURCE: &str = include_str!("../machines/iteration.otm");
pub const PREFIX_MAX_SOURCE: &str = include_str!("../machines/prefix_max.otm");
pub const FILR_SOURCE: &str = include_str!("../machines/filr.otm");
pub const SELFCOMP_SOURCE: &str = include_str!("../machines/selfcomp.otm");
pub const ZEROMAX_SOURCE: &str = include_str!("../machines/zeromax.otm");

/// Input `⟨a₀, b, c⟩`. The first action is the priming query
/// `1^{max(|⟨c,a₀⟩|, |⟨c,b⟩|)}`; no later query is longer.
pub fn build_r_machine() -> Machine {
    load("R", R_SOURCE)
}

pub fn build_st_machines() -> (Machine, Machine) {
    (load("S", S_SOURCE), load("T", T_SOURCE))
}

pub fn build_iteration_machine() -> Machine {
    load("iteration", ITERATION_SOURCE)
}

pub fn build_prefix_max_machine() -> Machine {
    load("prefix_max", PREFIX_MAX_SOURCE)
}

pub fn build_filr_machine() -> Machine {
    load("filr", FILR_SOURCE)
}

pub fn build_selfcomp_machine() -> Machine {
    load("selfcomp", SELFCOMP_SOURCE)
}

pub fn build_zeromax_machine() -> Machine {
    load("zeromax", ZEROMAX_SOURCE)
}

/// Oracle for `T` answering `⟨d, t⟩` by running `S` on `⟨t, b, d⟩` against `psi`.
pub fn s_as_oracle(psi: Oracle, b: BitString, fuel: u64) -> Oracle {
    let (s, _) = build_st_machines();
    Oracle::func("S-composite", move |q| {
        let d = proj1(q);
        let t = proj2(q);
        run(&s, &psi, &triple(&t, &b, &d), fuel)
            .map(|tr| tr.output)
            .map_err(|e| OracleError::Nested(Box::new(e)))
    })
}

/// Runs `T` against the composite `λdλt.𝒮(ψ, t, b, d)` on `⟨a, b, c⟩`.
pub fn run_st_composition(psi: &Oracle, input: &BitString, fuel: u64) -> Result<Trace, RunError> {
    let (_, t) = build_st_machines();
    let (_, b, _) = untriple(input);
    run(&t, &s_as_oracle(psi.clone(), b, fuel), input, fuel)
}

pub type OperatorFn = fn(&Oracle, &BitString) -> Result<BitString, OracleError>;

/// Library entry: pure reference, machine realization and declared metadata.
#[derive(Clone)]
pub struct OperatorRef {
    pub name: &'static str,
    pub reference: OperatorFn,
    pub machine: Option<fn() -> Machine>,
    /// Shape of the second-order running-time bound, up to a constant factor.
    pub bound_shape: &'static str,
    pub lookahead_revisions: Option<usize>,
    pub length_revisions: Option<usize>,
}

impl OperatorRef {
    pub fn build(&self) -> Option<Machine> {
        self.machine.map(|f| f())
    }
}

impl std::fmt::Debug for OperatorRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OperatorRef({})", self.name)
    }
}

pub fn library() -> Vec<OperatorRef> {
    fn s_machine() -> Machine {
        build_st_machines().0
    }
    fn t_machine() -> Machine {
        build_st_machines().1
    }
    vec![
        OperatorRef {
            name: "R",
            reference: r_operator,
            machine: Some(build_r_machine),
            bound_shape: "(n+1)^2",
            lookahead_revisions: Some(1),
            length_revisions: None,
        },
        OperatorRef {
            name: "S",
            reference: s_operator,
            machine: Some(s_machine),
            bound_shape: "n+1",
            lookahead_revisions: Some(1),
            length_revisions: Some(1),
        },
        OperatorRef {
            name: "T",
            reference: t_operator,
            machine: Some(t_machine),
            bound_shape: "(n+1)^2+l(3n+3)",
            lookahead_revisions: None,
            length_revisions: Some(1),
        },
        OperatorRef {
            name: "iteration",
            reference: iteration_operator,
            machine: Some(build_iteration_machine),
            bound_shape: "n+1",
            lookahead_revisions: None,
            length_revisions: None,
        },
        OperatorRef {
            name: "prefix_max",
            reference: prefix_max_operator,
            machine: Some(build_prefix_max_machine),
            bound_shape: "(n+1)*(l(n)+1)",
            lookahead_revisions: Some(1),
            length_revisions: None,
        },
        OperatorRef {
            name: "filr",
            reference: filr_operator,
            machine: Some(build_filr_machine),
            bound_shape: "(n+1)*(l(0)+1)",
            lookahead_revisions: None,
            length_revisions: None,
        },
        OperatorRef {
            name: "selfcomp",
            reference: selfcomp_operator,
            machine: Some(build_selfcomp_machine),
            bound_shape: "1",
            lookahead_revisions: Some(2),
            length_revisions: Some(2),
        },
        OperatorRef {
            name: "zeromax",
            reference: zeromax_operator,
            machine: Some(build_zeromax_machine),
            bound_shape: "(n+1)*(l(n)+1)",
            lookahead_revisions: Some(1),
            length_revisions: None,
        },
    ]
}

pub fn lookup(name: &str) -> Option<OperatorRef> {
    library().into_iter().find(|o| o.name.eq_ignore_ascii_case(name))
}

/// Library machine by name.
pub fn machine_by_name(name: &str) -> Option<Machine> {
    lookup(name).and_then(|o| o.build())
}

/// Shared handle to a library machine, for building composite oracles.
pub fn shared_machine(name: &str) -> Option<Arc<Machine>> {
    machine_by_name(name).map(Arc::new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::otm::metrics::metrics;
    use crate::otm::oracle::{BuiltinRule, FiniteTable};
    use crate::strings::bits;

    fn append_one(_: &BitString, y: &BitString) -> BitString {
        let mut y = y.clone();
        y.push(true);
        y
    }

    #[test]
    fn rec_examples() {
        assert_eq!(rec_ref(append_one, &bits("10"), &bits("1"), &bits("")), bits("10"));
        assert_eq!(rec_ref(append_one, &bits(""), &bits("111"), &bits("101")), bits("111"));
        assert_eq!(rec_ref(append_one, &bits(""), &bits("1"), &bits("11")), bits("1"));
    }

    #[test]
    fn rec_prime_examples() {
        let k11 = |_: &BitString| bits("11");
        let eps = |_: &BitString| bits("");
        assert_eq!(rec_prime_ref(append_one, &bits("0"), k11, &bits("")), bits("0"));
        assert_eq!(rec_prime_ref(append_one, &bits(""), k11, &bits("10")), bits("11"));
        assert_eq!(rec_prime_ref(append_one, &bits(""), eps, &bits("1")), bits(""));
    }

    /// `ψ⟨x, y⟩ = y·1`
    fn append_one_oracle() -> Oracle {
        Oracle::func("append-one-on-second", |q| Ok(append_one(&proj1(q), &proj2(q))))
    }

    #[test]
    fn r_machine_examples() {
        let m = build_r_machine();
        let psi = append_one_oracle();
        let input = triple(&bits(""), &bits("111"), &bits("101"));
        let t = run(&m, &psi, &input, 10_000).unwrap();
        assert_eq!(t.output, bits("111"));
        assert_eq!(metrics(&t).lookahead_revisions, 1);
        let input = triple(&bits("0110"), &bits("1"), &bits(""));
        let t = run(&m, &psi, &input, 10_000).unwrap();
        assert_eq!(t.output, bits("0110"));
        assert_eq!(t.events.len(), 1);
    }

    #[test]
    fn st_examples() {
        let psi = append_one_oracle();
        let input = triple(&bits(""), &bits("111"), &bits("101"));
        let t = run_st_composition(&psi, &input, 10_000).unwrap();
        assert_eq!(t.output, bits("111"));
        let (_, tm) = build_st_machines();
        let long = Oracle::Rule(BuiltinRule::Doubling);
        let t = run(&tm, &long, &triple(&bits(""), &bits("1"), &bits("11")), 10_000).unwrap();
        assert_eq!(t.output, bits(""));
        assert_eq!(t.events.len(), 1);
    }

    #[test]
    fn small_machine_examples() {
        let doubling = Oracle::Rule(BuiltinRule::Doubling);
        let it = build_iteration_machine();
        assert_eq!(run(&it, &doubling, &bits("111"), 1000).unwrap().output.len(), 8);
        assert_eq!(run(&it, &doubling, &bits(""), 1000).unwrap().output, bits("0"));
        let tab = Oracle::Table(FiniteTable::new(bits("")).with(bits("0"), bits("101")));
        assert_eq!(run(&it, &tab, &bits("1"), 1000).unwrap().output, bits("101"));

        let pm = build_prefix_max_machine();
        let tab = Oracle::Table(
            FiniteTable::new(bits(""))
                .with(bits(""), bits("11"))
                .with(bits("0"), bits("1"))
                .with(bits("01"), bits("11111")),
        );
        let t = run(&pm, &tab, &bits("01"), 1000).unwrap();
        assert_eq!(t.output, bits("11111"));
        assert_eq!(metrics(&t).lookahead_revisions, 1);

        let filr = build_filr_machine();
        let tab = Oracle::Table(
            FiniteTable::new(bits(""))
                .with(bits(""), bits("11"))
                .with(bits("11"), bits("101"))
                .with(bits("101"), bits("0110")),
        );
        assert_eq!(run(&filr, &tab, &bits(""), 1000).unwrap().output, bits(""));
        assert_eq!(run(&filr, &tab, &bits("1"), 1000).unwrap().output, bits("10"));

        let g = build_selfcomp_machine();
        let tab = Oracle::Table(
            FiniteTable::new(bits("")).with(bits("1"), bits("00")).with(bits("00"), bits("111")),
        );
        assert_eq!(run(&g, &tab, &bits("1"), 1000).unwrap().output, bits("111"));

        let zm = build_zeromax_machine();
        let tab = Oracle::Table(
            FiniteTable::new(bits(""))
                .with(bits(""), bits("1"))
                .with(bits("0"), bits("101"))
                .with(bits("00"), bits("11")),
        );
        let t = run(&zm, &tab, &bits("11"), 1000).unwrap();
        assert_eq!(t.output, bits("000"));
        assert_eq!(metrics(&t).lookahead_revisions, 1);
    }

    #[test]
    fn machine_files_round_trip() {
        for op in library() {
            let m = op.build().unwrap();
            assert_eq!(m.name(), op.name);
            assert_eq!(parse_machine_text(&m.to_text()).unwrap(), m);
        }
    }
}
