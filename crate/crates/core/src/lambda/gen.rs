//! Random well-typed terms over a fixed signature, for property tests.

use rand::Rng;

use super::eval::{Assignment, Value};
use super::library::Constants;
use super::term::Term;
use super::types::SimpleType;
use crate::otm::{FiniteTable, Oracle};
use crate::strings::BitString;

pub const MAX_TERM_SIZE: usize = 12;
pub const MAX_TYPE_DEPTH: usize = 3;

/// Free variables available to generated terms: `f: 0→0`, `g: 0→0→0`,
/// `h: (0→0)→0`, `x, y: 0`.
pub fn signature() -> Vec<(String, SimpleType)> {
    vec![
        ("f".into(), SimpleType::first_order(1)),
        ("g".into(), SimpleType::first_order(2)),
        ("h".into(), SimpleType::function([SimpleType::first_order(1)])),
        ("x".into(), SimpleType::Ground),
        ("y".into(), SimpleType::Ground),
    ]
}

const CONSTS: &[&str] = &["eps", "pair", "pi1", "concat", "trunc", "append1"];

fn random_type(rng: &mut impl Rng, depth: usize) -> SimpleType {
    if depth == 0 || rng.gen_bool(0.6) {
        SimpleType::Ground
    } else {
        SimpleType::arrow(random_type(rng, depth - 1), random_type(rng, depth - 1))
    }
}

struct Gen<'a, R> {
    rng: &'a mut R,
    ctx: Vec<(String, SimpleType)>,
    counter: usize,
}

impl<R: Rng> Gen<'_, R> {
    /// Heads (variables or constants) whose result type is `goal` after some arguments.
    fn heads(&self, goal: &SimpleType) -> Vec<(Term, Vec<SimpleType>)> {
        let lib = Constants::library();
        let mut out = Vec::new();
        let mut push = |head: Term, ty: &SimpleType| {
            let mut args = Vec::new();
            let mut t = ty.clone();
            loop {
                if &t == goal {
                    out.push((head.clone(), args.clone()));
                }
                match t {
                    SimpleType::Arrow(a, b) => {
                        args.push(*a);
                        t = *b;
                    }
                    SimpleType::Ground => break,
                }
            }
        };
        let mut seen = std::collections::BTreeSet::new();
        for (x, ty) in self.ctx.iter().rev() {
            // only the innermost binding of a name is visible
            if seen.insert(x.as_str()) {
                push(Term::Var(x.clone(), ty.clone()), ty);
            }
        }
        for c in CONSTS {
            let (ty, _) = lib.get(c).expect("signature constant");
            push(Term::Const(c.to_string(), ty.clone()), ty);
        }
        out
    }

    fn term(&mut self, goal: &SimpleType, budget: usize) -> Term {
        if let SimpleType::Arrow(a, b) = goal {
            if budget >= 2 && self.rng.gen_bool(0.5) || self.heads(goal).is_empty() {
                return self.abs(a, b, budget);
            }
        } else if budget >= 4 && self.rng.gen_bool(0.3) {
            // β-redex (λv:σ. body) arg
            let sigma = random_type(self.rng, 1);
            let arg_budget = budget / 3;
            let arg = self.term(&sigma, arg_budget.max(1));
            let v = self.var_name();
            self.ctx.push((v.clone(), sigma.clone()));
            let body = self.term(goal, budget.saturating_sub(arg.size() + 2).max(1));
            self.ctx.pop();
            return Term::app(Term::abs(&v, sigma, body), arg);
        }
        let mut heads = self.heads(goal);
        heads.retain(|(_, args)| args.len() < budget);
        if heads.is_empty() {
            heads = self.heads(goal);
            heads.sort_by_key(|(_, a)| a.len());
            heads.truncate(1);
        }
        let (head, args) = heads.swap_remove(self.rng.gen_range(0..heads.len()));
        let mut left = budget.saturating_sub(1);
        let mut t = head;
        for a in &args {
            let share = (left / args.len()).max(1);
            let arg = self.term(a, share);
            left = left.saturating_sub(arg.size());
            t = Term::app(t, arg);
        }
        t
    }

    fn abs(&mut self, a: &SimpleType, b: &SimpleType, budget: usize) -> Term {
        let v = self.var_name();
        self.ctx.push((v.clone(), a.clone()));
        let body = self.term(b, budget.saturating_sub(1).max(1));
        self.ctx.pop();
        Term::abs(&v, a.clone(), body)
    }

    fn var_name(&mut self) -> String {
        self.counter += 1;
        // reuse a few names to exercise shadowing and capture
        ["u", "v", "w", "x", "y"][self.counter % 5].to_string()
    }
}

/// A well-typed term of type `goal` over [`signature`], roughly `≤ size` nodes.
pub fn random_term(rng: &mut impl Rng, goal: &SimpleType, size: usize) -> Term {
    let mut g = Gen { rng, ctx: signature(), counter: 0 };
    g.term(goal, size.max(1))
}

/// A random type of depth ≤ [`MAX_TYPE_DEPTH`].
pub fn random_goal(rng: &mut impl Rng) -> SimpleType {
    random_type(rng, MAX_TYPE_DEPTH)
}

fn random_bits(rng: &mut impl Rng, max_len: usize) -> BitString {
    let n = rng.gen_range(0..=max_len);
    BitString::from_bits((0..n).map(|_| rng.gen_bool(0.5)).collect())
}

fn random_table(rng: &mut impl Rng) -> Oracle {
    let mut t = FiniteTable::new(random_bits(rng, 3));
    for q in BitString::all_up_to(3) {
        if rng.gen_bool(0.5) {
            t = t.with(q, random_bits(rng, 5));
        }
    }
    Oracle::Table(t)
}

/// A random assignment for [`signature`].
pub fn random_assignment(rng: &mut impl Rng) -> Assignment {
    let f = random_table(rng);
    let g = random_table(rng);
    let h_probe = random_bits(rng, 3);
    let h = Value::func(move |phi| Ok(Value::Str(phi.call_str(&[&h_probe])?.concat(&BitString::zeros(1)))));
    let x = random_bits(rng, 4);
    let y = random_bits(rng, 4);
    let sig = signature();
    Assignment::new()
        .with(&sig[0].0, sig[0].1.clone(), Value::oracle(f))
        .and_then(|a| a.with(&sig[1].0, sig[1].1.clone(), Value::paired_oracle(g)))
        .and_then(|a| a.with(&sig[2].0, sig[2].1.clone(), h))
        .expect("signature types")
        .with_str("x", x)
        .with_str("y", y)
}

/// Probes a value of type `ty` on deterministic ground arguments: functions of
/// type `0 → …` are applied to strings, function-typed arguments get
/// projections of their own inputs. Returns the observed strings.
pub fn observe(
    v: &Value,
    ty: &SimpleType,
    probes: &[BitString],
) -> Result<Vec<BitString>, super::LambdaError> {
    let args = ty.args();
    if args.is_empty() {
        return Ok(vec![v.as_str()?.clone()]);
    }
    let mut out = Vec::new();
    for p in probes {
        let mut cur = v.clone();
        for a in &args {
            cur = cur.apply(probe_value(a, p))?;
        }
        out.push(cur.into_str()?);
    }
    Ok(out)
}

fn probe_value(ty: &SimpleType, p: &BitString) -> Value {
    if ty.is_ground() {
        return Value::Str(p.clone());
    }
    let n = ty.args().len();
    let p = p.clone();
    // a function that concatenates its string arguments (or probes its function arguments) onto p
    fn build(remaining: Vec<SimpleType>, acc: BitString) -> Value {
        if remaining.is_empty() {
            return Value::Str(acc);
        }
        Value::func(move |arg| {
            let (first, rest) = remaining.split_first().expect("nonempty");
            let piece = match &arg {
                Value::Str(s) => s.clone(),
                Value::Fun(_) => observe(&arg, first, std::slice::from_ref(&acc))?.remove(0),
            };
            let mut next = acc.clone();
            next.push(true);
            Ok(build(rest.to_vec(), next.concat(&piece)))
        })
    }
    debug_assert!(n > 0);
    build(ty.args().into_iter().cloned().collect(), p)
}
