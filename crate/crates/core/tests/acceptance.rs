//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::Instant;

use num_bigint::BigUint;

use lookahead_core::corpus::{self, RecCase, UnaryCase};
use lookahead_core::lambda::{beta_eta_normalize, bridge_term, eval_term, gen, Assignment, Value};
use lookahead_core::operators::{self, rec_prime_ref, rec_ref, OperatorRef};
use lookahead_core::otm::{
    brute_force_step_count, check_step_count_ks, check_step_count_plain, metrics, oracle_size, run,
    BuiltinRule, FiniteTable, Machine, Oracle, Trace,
};
use lookahead_core::sopoly::{
    composition_bound, eval_sop, mpt_time_bound, step_count_from_bound, SizeFunction, Sop, UnaryPolynomial,
};
use lookahead_core::strings::{pair, BitString};
use lookahead_core::transforms::{
    budgeted_compose, factorize, filr_adversary, filr_adversary_with, inline_compose, iteration_adversary,
    run_factored, selfcomp_adversary, FilrReading,
};

const SEED_A: u64 = 0x5eed_000a;
const SEED_B: u64 = 0x5eed_000b;
const FUEL: u64 = 500_000_000;

const REC_CASES: usize = 500;
const REC_MAX_COMPONENT: usize = 12;
const FACTOR_CASES: usize = 500;
const FACTOR_REC_MAX_COMPONENT: usize = 6;
const UNARY_MAX_INPUT: usize = 8;
/// Answers in the unary corpus have length `≤ 6`; with the input and ε that
/// leaves at most 8 distinct query lengths for filr.
const UNARY_CLASS_LOOKAHEAD: usize = 8;
const SIZE_CHECK_MAX_INPUT: usize = 8;
const LIBRARY_CASES: usize = 200;
const ITERATION_NS: std::ops::RangeInclusive<u64> = 1..=6;
const ITERATION_STEP_COUNT: &str = "5n+5";
const FILR_STEP_COUNT: &str = "n^2+7n+6";
const FILR_K: usize = 3;
const SELFCOMP_KS: std::ops::RangeInclusive<usize> = 2..=8;
const BUDGETED_MAX_LOOKAHEAD: usize = 4;
const ZEROMAX_STEP_COUNT: &str = "5n^2+20n+20";
const SELFCOMP_STEP_COUNT: &str = "3";
const DOUBLING_MAX_INPUT: usize = 10;
const BRUTE_N: usize = 3;
const BRUTE_OBSERVED: usize = 300;
const LAMBDA_CASES: usize = 200;
const LAMBDA_MAX_SIZE: usize = 10;
const TERM_MAX_SIZE: usize = 12;
/// Polynomial degrees tried when fitting a step-count to traces.
const FIT_DEGREES: std::ops::RangeInclusive<u32> = 1..=4;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn go(m: &Machine, o: &Oracle, a: &BitString) -> Result<Trace, String> {
    run(m, o, a, FUEL).map_err(|e| format!("{} on {a}: {e}", m.name()))
}

fn table_of(o: &Oracle) -> &FiniteTable {
    match o {
        Oracle::Table(t) => t,
        _ => panic!("corpus oracles are tables"),
    }
}

fn rec_expected(case: &RecCase) -> BitString {
    let t = case.table();
    rec_ref(|x, y| t.lookup(&pair(x, y)).clone(), &case.a, &case.b, &case.c)
}

/// `|φ|` of a finite table: enumeration where allowed, the closed form beyond.
struct ExactSize<'a>(&'a FiniteTable);

impl SizeFunction for ExactSize<'_> {
    fn size(&self, n: &BigUint) -> BigUint {
        let n: usize = n.try_into().unwrap_or(usize::MAX);
        BigUint::from(oracle_size(self.0, n).unwrap_or_else(|_| self.0.size_at(n)))
    }
}

fn sop_at(p: &Sop, table: &FiniteTable, n: usize) -> BigUint {
    eval_sop(p, &ExactSize(table), &BigUint::from(n))
}

fn within(t: &Trace, p: &Sop, table: &FiniteTable) -> bool {
    BigUint::from(t.steps) <= sop_at(p, table, t.input_length)
}

type Runs = Vec<(Trace, FiniteTable)>;

fn fit_sop(shape: &Sop, runs: &Runs) -> Sop {
    let c = corpus::fit_constant(runs.iter().map(|(t, tab)| (t.steps, sop_at(shape, tab, t.input_length))));
    corpus::scaled(c, shape)
}

/// Fits `c·(n+1)^d` on `fit` for the least `d` that also covers `check`.
fn fit_step_count(fit: &[&Trace], check: &[&Trace]) -> Option<UnaryPolynomial> {
    FIT_DEGREES
        .map(|d| corpus::fit_power(fit, d))
        .find(|p| check.iter().all(|t| check_step_count_plain(t, p)))
}

fn rec_cases(seed: u64, n: usize, max: usize) -> Vec<(Oracle, BitString)> {
    corpus::rec_corpus(seed, n, max).into_iter().map(|c| (c.psi.clone(), c.input())).collect()
}

fn unary_cases(seed: u64, n: usize) -> Vec<(Oracle, BitString)> {
    corpus::unary_corpus(seed, n, UNARY_MAX_INPUT).into_iter().map(|UnaryCase { phi, a }| (phi, a)).collect()
}

/// Recursion cases whose tupled input has length `≤ SIZE_CHECK_MAX_INPUT`.
fn small_rec_cases(seed: u64, n: usize) -> Vec<(Oracle, BitString)> {
    rec_cases(seed, 40 * n, 3).into_iter().filter(|(_, a)| a.len() <= SIZE_CHECK_MAX_INPUT).take(n).collect()
}

fn runs_of(m: &Machine, cases: &[(Oracle, BitString)]) -> Result<Runs, String> {
    cases.iter().map(|(o, a)| Ok((go(m, o, a)?, table_of(o).clone()))).collect()
}

// ---------------------------------------------------------------- criterion 1

fn rec_fidelity() -> Check {
    let r = operators::build_r_machine();
    let mut per_seed = Vec::new();
    for seed in [SEED_A, SEED_B] {
        let mut runs = Vec::new();
        for case in corpus::rec_corpus(seed, REC_CASES, REC_MAX_COMPONENT) {
            let t = go(&r, &case.psi, &case.input())?;
            ensure!(t.output == rec_expected(&case), "R output differs from Rec on {}", case.input());
            let revs = metrics(&t).lookahead_revisions;
            ensure!(revs == 1, "R made {revs} lookahead revisions on {}", case.input());
            runs.push(t);
        }
        per_seed.push(runs);
    }
    let fit: Vec<&Trace> = per_seed[0].iter().collect();
    let p = corpus::fit_power(&fit, 2);
    let c = p.coeffs()[0];
    let bad = per_seed[1].iter().filter(|t| !check_step_count_plain(t, &p)).count();
    ensure!(bad == 0, "c = {c} fitted on seed A fails on {bad} seed-B runs");
    Ok(format!("{} cases; one lookahead revision each; steps <= {c}(m+1)^2", 2 * REC_CASES))
}

// ---------------------------------------------------------------- criterion 2

fn st_decomposition() -> Check {
    let mut worst = 0;
    for seed in [SEED_A, SEED_B] {
        for case in corpus::rec_corpus(seed, REC_CASES, REC_MAX_COMPONENT) {
            let t = operators::run_st_composition(&case.psi, &case.input(), FUEL)
                .map_err(|e| format!("S/T on {}: {e}", case.input()))?;
            ensure!(t.output == rec_expected(&case), "T∘S differs from Rec on {}", case.input());
            let lr = metrics(&t).length_revisions;
            ensure!(lr <= 1, "T made {lr} length revisions on {}", case.input());
            worst = worst.max(lr);
        }
    }
    Ok(format!("{} cases; T length revisions <= {worst}", 2 * REC_CASES))
}

// ---------------------------------------------------------------- criterion 3

struct Subject {
    machine: Machine,
    shape: Sop,
    r: usize,
    /// cases for seeds A and B
    cases: [Vec<(Oracle, BitString)>; 2],
}

fn factor_subjects() -> Vec<Subject> {
    let rec = |seed| rec_cases(seed, FACTOR_CASES, FACTOR_REC_MAX_COMPONENT);
    let unary = |seed| unary_cases(seed, FACTOR_CASES);
    vec![
        Subject {
            machine: operators::build_r_machine(),
            shape: "(n+1)^2".parse().unwrap(),
            r: 1,
            cases: [rec(SEED_A), rec(SEED_B)],
        },
        Subject {
            machine: operators::build_filr_machine(),
            shape: "(n+1)*(l(0)+1)".parse().unwrap(),
            r: UNARY_CLASS_LOOKAHEAD,
            cases: [unary(SEED_A), unary(SEED_B)],
        },
        Subject {
            machine: operators::build_prefix_max_machine(),
            shape: "(n+1)*(l(n)+1)".parse().unwrap(),
            r: 1,
            cases: [unary(SEED_A), unary(SEED_B)],
        },
    ]
}

fn factorization() -> Check {
    let mut notes = Vec::new();
    for s in factor_subjects() {
        let name = s.machine.name().to_string();
        let fit_runs = runs_of(&s.machine, &s.cases[0])?;
        let p = step_count_from_bound(&fit_sop(&s.shape, &fit_runs));
        let f = factorize(&s.machine, &p, s.r);
        let mut outer_traces: [Vec<Trace>; 2] = [Vec::new(), Vec::new()];
        let mut inner_traces: [Vec<Trace>; 2] = [Vec::new(), Vec::new()];
        let (mut n_rev, mut m_rev) = (0, 0);
        for (i, cases) in s.cases.iter().enumerate() {
            for (o, a) in cases {
                let direct = go(&s.machine, o, a)?;
                ensure!(check_step_count_plain(&direct, &p), "{name}: p = {p} is not a step-count on {a}");
                let (outer, inner) =
                    run_factored(&f, o, a, FUEL).map_err(|e| format!("{name} factored on {a}: {e}"))?;
                ensure!(outer.output == direct.output, "{name}: N∘M̃ differs on {a}");
                let nr = metrics(&outer).length_revisions;
                ensure!(nr <= 2 * s.r + 1, "{name}: N made {nr} length revisions on {a}");
                n_rev = n_rev.max(nr);
                for t in &inner {
                    let mr = metrics(t).length_revisions;
                    ensure!(mr <= 2, "{name}: M̃ made {mr} length revisions on {a}");
                    m_rev = m_rev.max(mr);
                }
                outer_traces[i].push(outer);
                inner_traces[i].extend(inner);
            }
        }
        let mut fitted = Vec::new();
        for (label, traces) in [("N", &outer_traces), ("M̃", &inner_traces)] {
            let fit: Vec<&Trace> = traces[0].iter().collect();
            let check: Vec<&Trace> = traces[1].iter().collect();
            let Some(q) = fit_step_count(&fit, &check) else {
                return Err(format!("{name}: no polynomial step-count of degree <= 4 for {label}"));
            };
            let ks_bad = fit.iter().chain(&check).filter(|t| !check_step_count_ks(t, &q)).count();
            ensure!(ks_bad == 0, "{name}: {label} step-count {q} fails KS on {ks_bad} runs");
            fitted.push(format!("{label} <= {q}"));
        }
        notes.push(format!(
            "{name} (r={}): N length rev <= {n_rev}, M̃ length rev <= {m_rev}, {}",
            s.r,
            fitted.join(", ")
        ));
    }
    Ok(format!("{} cases per machine; {}", 2 * FACTOR_CASES, notes.join("; ")))
}

// ---------------------------------------------------------------- criterion 4

fn forced_revisions() -> Check {
    // iteration
    let it = operators::build_iteration_machine();
    let t: UnaryPolynomial = ITERATION_STEP_COUNT.parse().unwrap();
    for n in 0..=BRUTE_N {
        let b = brute_force_step_count(&it, n, FUEL).map_err(|e| e.to_string())?;
        ensure!(BigUint::from(b) <= t.eval_u64(n as u64), "t = {t} below brute force {b} at n = {n}");
    }
    for (o, a) in unary_cases(SEED_A, LIBRARY_CASES) {
        ensure!(check_step_count_plain(&go(&it, &o, &a)?, &t), "t = {t} is not a step-count on {a}");
    }
    let mut iter_revs = Vec::new();
    for n in ITERATION_NS {
        let tr = go(&it, &iteration_adversary(&t, n), &BitString::zeros(n as usize))?;
        let r = metrics(&tr).lookahead_revisions;
        ensure!(r >= n as usize, "iteration adversary n = {n} forced only {r} revisions");
        iter_revs.push(r);
    }

    // selfcomp
    let (zm, sc) = (operators::build_zeromax_machine(), operators::build_selfcomp_machine());
    let plain = inline_compose(&zm, &sc);
    let budgeted = budgeted_compose(
        &zm,
        &ZEROMAX_STEP_COUNT.parse().unwrap(),
        &sc,
        &SELFCOMP_STEP_COUNT.parse().unwrap(),
    );
    let (mut inline_revs, mut budget_revs) = (Vec::new(), Vec::new());
    for k in SELFCOMP_KS {
        let o = selfcomp_adversary(k);
        let a = BitString::zeros(k);
        let x = go(&plain, &o, &a)?;
        let y = go(&budgeted, &o, &a)?;
        ensure!(x.output == y.output, "budgeted and inline compositions differ at k = {k}");
        inline_revs.push(metrics(&x).lookahead_revisions);
        budget_revs.push(metrics(&y).lookahead_revisions);
    }
    ensure!(
        inline_revs.windows(2).all(|w| w[1] > w[0]),
        "inline revisions not strictly increasing: {inline_revs:?}"
    );
    ensure!(
        budget_revs.iter().all(|&r| r <= BUDGETED_MAX_LOOKAHEAD),
        "budgeted revisions exceed {BUDGETED_MAX_LOOKAHEAD}: {budget_revs:?}"
    );

    // filr
    let filr = operators::build_filr_machine();
    let p: UnaryPolynomial = FILR_STEP_COUNT.parse().unwrap();
    let filr_revs = |reading| -> Result<Vec<usize>, String> {
        let adv = filr_adversary_with(&filr, &p, FILR_K, FUEL, reading).map_err(|e| e.to_string())?;
        adv.oracles
            .iter()
            .map(|o| Ok(metrics(&go(&filr, o, &BitString::ones(FILR_K))?).lookahead_revisions))
            .collect()
    };
    let literal = filr_revs(FilrReading::Literal)?;
    let chained = filr_revs(FilrReading::Chained)?;
    let m = filr_adversary(&filr, &p, FILR_K, FUEL).map_err(|e| e.to_string())?.m;
    let summary = format!(
        "iteration {iter_revs:?}; inline {inline_revs:?}, budgeted {budget_revs:?}; \
         filr psi_0..psi_{FILR_K} (m={m}) {literal:?}"
    );
    let short: Vec<usize> = (0..=FILR_K).filter(|&i| literal[i] < i).collect();
    ensure!(
        short.is_empty(),
        "{summary}; filr adversary forces fewer than i revisions for i in {short:?} \
         (informational: with a_j answered by 1^((p+1)^j(m)) the counts are {chained:?})"
    );
    Ok(summary)
}

// ---------------------------------------------------------------- criterion 5

fn exponential_growth() -> Check {
    let it = operators::build_iteration_machine();
    let doubling = Oracle::Rule(BuiltinRule::Doubling);
    for n in 0..=DOUBLING_MAX_INPUT {
        let t = go(&it, &doubling, &BitString::ones(n))?;
        ensure!(t.output.len() == 1 << n, "|output| = {} at |a| = {n}", t.output.len());
    }
    Ok(format!("|output| = 2^|a| for |a| <= {DOUBLING_MAX_INPUT}"))
}

// ---------------------------------------------------------------- criterion 6

fn library_cases(op: &OperatorRef, seed: u64) -> Vec<(Oracle, BitString)> {
    match op.name {
        "R" | "S" | "T" => small_rec_cases(seed, LIBRARY_CASES),
        _ => unary_cases(seed, LIBRARY_CASES),
    }
}

fn step_count_theory() -> Check {
    let mut notes = Vec::new();
    for op in operators::library() {
        let m = op.build().expect("library machines");
        let shape: Sop = op.bound_shape.parse().unwrap();
        let runs_a = runs_of(&m, &library_cases(&op, SEED_A))?;
        let runs_b = runs_of(&m, &library_cases(&op, SEED_B))?;
        for (_, tab) in runs_a.iter().chain(&runs_b) {
            for n in 0..=SIZE_CHECK_MAX_INPUT {
                ensure!(oracle_size(tab, n) == Ok(tab.size_at(n)), "size function mismatch at {n}");
            }
        }
        let big_p = fit_sop(&shape, &runs_a);
        let bad = runs_b.iter().filter(|(t, tab)| !within(t, &big_p, tab)).count();
        ensure!(bad == 0, "{}: bound {big_p} fails on {bad} seed-B runs", op.name);
        let p = step_count_from_bound(&big_p);
        let all: Vec<&Trace> = runs_a.iter().chain(&runs_b).map(|(t, _)| t).collect();
        let plain_bad = all.iter().filter(|t| !check_step_count_plain(t, &p)).count();
        ensure!(plain_bad == 0, "{}: p = {p} fails the plain check on {plain_bad} runs", op.name);
        let fit: Vec<&Trace> = runs_a.iter().map(|(t, _)| t).collect();
        let check: Vec<&Trace> = runs_b.iter().map(|(t, _)| t).collect();
        let fitted = fit_step_count(&fit, &check)
            .ok_or_else(|| format!("{}: no polynomial step-count of degree <= 4", op.name))?;
        for q in [&p, &fitted] {
            let ks_bad = all.iter().filter(|t| !check_step_count_ks(t, q)).count();
            ensure!(ks_bad == 0, "{}: {q} fails KS on {ks_bad} runs", op.name);
        }
        notes.push(format!("{}: P = {big_p}", op.name));
    }

    // brute force on toy machines
    let mut brute = Vec::new();
    for name in ["selfcomp", "zeromax", "prefix_max"] {
        let m = operators::machine_by_name(name).unwrap();
        let mut r = corpus::rng(SEED_A);
        let mut maxima = Vec::new();
        for n in 0..=BRUTE_N {
            let b = brute_force_step_count(&m, n, FUEL).map_err(|e| format!("{name}: {e}"))?;
            for _ in 0..BRUTE_OBSERVED {
                let tab = corpus::random_table(&mut r, n + 1, n, 0.7);
                let a = corpus::random_bits(&mut r, n);
                let t = go(&m, &Oracle::Table(tab), &a)?;
                ensure!(t.steps <= b, "{name}: observed {} > brute force {b} at n = {n}", t.steps);
            }
            maxima.push(b);
        }
        brute.push(format!("{name} {maxima:?}"));
    }
    Ok(format!("{}; brute force n<=3: {}", notes.join(", "), brute.join(", ")))
}

// ---------------------------------------------------------------- criterion 7

fn bounds() -> Check {
    let mut notes = Vec::new();
    type Subject = (Machine, Sop, Option<UnaryPolynomial>, usize, fn(u64) -> Vec<(Oracle, BitString)>);
    let subjects: [Subject; 2] = [
        (operators::build_r_machine(), "(n+1)^2".parse().unwrap(), None, 1, |s| {
            rec_cases(s, LIBRARY_CASES, 8)
        }),
        (
            operators::build_filr_machine(),
            "(n+1)*(l(0)+1)".parse().unwrap(),
            Some(FILR_STEP_COUNT.parse().unwrap()),
            UNARY_CLASS_LOOKAHEAD,
            |s| unary_cases(s, LIBRARY_CASES),
        ),
    ];
    for (m, shape, fixed, r, cases) in subjects {
        let p = match fixed {
            Some(p) => p,
            None => step_count_from_bound(&fit_sop(&shape, &runs_of(&m, &cases(SEED_A))?)),
        };
        let bound = mpt_time_bound(&p, r);
        for (t, tab) in runs_of(&m, &cases(SEED_B))? {
            ensure!(check_step_count_plain(&t, &p), "{}: p = {p} is not a step-count", m.name());
            ensure!(within(&t, &bound, &tab), "{}: {} steps exceed the MPT bound", m.name(), t.steps);
        }
        notes.push(format!("{} p = {p}, r = {r}", m.name()));
    }

    // inline composition against C·(P(l,q)·q + 1)
    let sc = operators::build_selfcomp_machine();
    let inner_p = "3".parse::<Sop>().unwrap();
    let mut outers = Vec::new();
    for name in ["zeromax", "prefix_max"] {
        let m = operators::machine_by_name(name).unwrap();
        let shape: Sop = operators::lookup(name).unwrap().bound_shape.parse().unwrap();
        let q = fit_sop(&shape, &runs_of(&m, &unary_cases(SEED_A, LIBRARY_CASES))?);
        outers.push((inline_compose(&m, &sc), q));
    }
    let base = |t: &Trace, q: &Sop, tab: &FiniteTable, c: u64| {
        composition_bound(&inner_p, q, c, &ExactSize(tab), &BigUint::from(t.input_length))
    };
    let mut samples = Vec::new();
    for (m, q) in &outers {
        for (t, tab) in runs_of(m, &unary_cases(SEED_A, LIBRARY_CASES))? {
            samples.push((t.steps, base(&t, q, &tab, 1)));
        }
    }
    let c = corpus::fit_constant(samples);
    for (m, q) in &outers {
        for (t, tab) in runs_of(m, &unary_cases(SEED_B, LIBRARY_CASES))? {
            let b = base(&t, q, &tab, c);
            ensure!(BigUint::from(t.steps) <= b, "{}: {} steps > {b} with C = {c}", m.name(), t.steps);
        }
    }
    notes.push(format!("composition C = {c}"));
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------- criterion 8

fn lambda_calculus() -> Check {
    let mut r = corpus::rng(SEED_A);
    let probes: Vec<BitString> =
        ["", "0", "1", "0110", "111"].iter().map(|s| lookahead_core::bits(s)).collect();
    let mut checked = 0;
    while checked < LAMBDA_CASES {
        let goal = gen::random_goal(&mut r);
        let t = gen::random_term(&mut r, &goal, TERM_MAX_SIZE);
        if t.size() > TERM_MAX_SIZE {
            continue;
        }
        let ty = t.type_of().map_err(|e| format!("generated ill-typed term {t}: {e}"))?;
        let n = beta_eta_normalize(&t);
        ensure!(n.type_of().ok() == Some(ty.clone()), "normalization changed the type of {t}");
        let env = gen::random_assignment(&mut r);
        let before = gen::observe(&eval_term(&t, &env).map_err(|e| e.to_string())?, &ty, &probes);
        let after = gen::observe(&eval_term(&n, &env).map_err(|e| e.to_string())?, &ty, &probes);
        ensure!(before.as_ref().ok() == after.as_ref().ok(), "{t} and its normal form {n} disagree");
        checked += 1;
    }

    let closed = |name: &str| -> Result<Value, String> {
        eval_term(&bridge_term(name).map_err(|e| e.to_string())?, &Assignment::new())
            .map_err(|e| e.to_string())
    };
    let s = |b: &BitString| Value::Str(b.clone());
    let (via_prime, via_rec, op_r) =
        (closed("rec_via_recprime")?, closed("recprime_via_rec")?, closed("operator_R")?);
    let (argmax, filr_term) = (closed("argmax_via_T")?, closed("filr_as_rec")?);
    let r_machine = operators::build_r_machine();
    for (i, case) in corpus::rec_corpus(SEED_B, LAMBDA_CASES, LAMBDA_MAX_SIZE).into_iter().enumerate() {
        let phi = Value::paired_oracle(case.psi.clone());
        let got = via_prime
            .call([phi.clone(), s(&case.a), s(&case.b), s(&case.c)])
            .and_then(Value::into_str)
            .map_err(|e| e.to_string())?;
        ensure!(got == rec_expected(&case), "rec_via_recprime differs on case {i}");

        let psi = corpus::hash_oracle(i as u64, LAMBDA_MAX_SIZE);
        let tab = case.table();
        let expect = rec_prime_ref(
            |x, y| tab.lookup(&pair(x, y)).clone(),
            &case.a,
            |x| psi.answer(x).unwrap(),
            &case.c,
        );
        let got = via_rec
            .call([phi, s(&case.a), Value::oracle(psi.clone()), s(&case.c)])
            .and_then(Value::into_str)
            .map_err(|e| e.to_string())?;
        ensure!(got == expect, "recprime_via_rec differs on case {i}");

        let got = op_r
            .call([Value::oracle(case.psi.clone()), s(&case.input())])
            .and_then(Value::into_str)
            .map_err(|e| e.to_string())?;
        ensure!(got == go(&r_machine, &case.psi, &case.input())?.output, "operator_R differs on case {i}");
    }
    let (pm, filr) = (operators::build_prefix_max_machine(), operators::build_filr_machine());
    for (o, a) in unary_cases(SEED_B, LAMBDA_CASES) {
        let got = argmax
            .call([Value::oracle(o.clone()), s(&a)])
            .and_then(Value::into_str)
            .map_err(|e| e.to_string())?;
        ensure!(got == operators::prefix_max_operator(&o, &a).unwrap(), "argmax_via_T differs on {a}");
        ensure!(got == go(&pm, &o, &a)?.output, "argmax_via_T differs from the machine on {a}");
        let got = filr_term
            .call([Value::oracle(o.clone()), s(&a)])
            .and_then(Value::into_str)
            .map_err(|e| e.to_string())?;
        ensure!(got == go(&filr, &o, &a)?.output, "filr term differs from the machine on {a}");
    }
    Ok(format!(
        "{LAMBDA_CASES} generated terms; {LAMBDA_CASES} instances per bridge identity and for the filr term"
    ))
}

// ---------------------------------------------------------------- criterion 9

fn determinism() -> Check {
    let mut total = 0;
    for op in operators::library() {
        let m = op.build().expect("library machines");
        for (o, a) in library_cases(&op, SEED_A) {
            let x = go(&m, &o, &a)?;
            let y = go(&m, &o, &a)?;
            let (jx, jy) =
                (serde_json::to_vec(&x.to_file()).unwrap(), serde_json::to_vec(&y.to_file()).unwrap());
            ensure!(x == y && jx == jy, "{}: repeated runs differ on {a}", op.name);
            let replay = go(&m, &Oracle::Table(x.to_table()), &a)?;
            ensure!(replay == x, "{}: replay against the trace table differs on {a}", op.name);
            total += 1;
        }
    }
    Ok(format!("{total} runs repeated and replayed"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 9] = [
        ("rec fidelity", rec_fidelity),
        ("S/T decomposition", st_decomposition),
        ("factorization", factorization),
        ("forced revisions", forced_revisions),
        ("exponential growth", exponential_growth),
        ("step-count theory", step_count_theory),
        ("bounds", bounds),
        ("lambda calculus", lambda_calculus),
        ("determinism and locality", determinism),
    ];
    let results: Vec<(Check, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let start = Instant::now();
                    let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
                    (r, start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (result, secs))) in criteria.iter().zip(results).enumerate() {
        match result {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
