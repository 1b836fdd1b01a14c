//! Registered constants and the bridge terms between functionals and operators.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use super::eval::Value;
use super::parse::parse_term;
use super::term::Term;
use super::types::SimpleType;
use super::LambdaError;
use crate::operators::{argmax_step, s_ref, t_driver_ref, triple, try_rec_prime_ref, try_rec_ref, untriple};
use crate::strings::{pair, proj1, proj2, BitString};

/// Name → (type, value).
#[derive(Clone, Default)]
pub struct Constants {
    table: BTreeMap<String, (SimpleType, Value)>,
}

impl Constants {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, ty: SimpleType, v: Value) {
        self.table.insert(name.to_string(), (ty, v));
    }

    pub fn get(&self, name: &str) -> Option<&(SimpleType, Value)> {
        self.table.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(String::as_str)
    }

    pub fn library() -> &'static Constants {
        static LIB: OnceLock<Constants> = OnceLock::new();
        LIB.get_or_init(build_library)
    }
}

fn g() -> SimpleType {
    SimpleType::Ground
}

fn f1() -> SimpleType {
    SimpleType::first_order(1)
}

fn f2() -> SimpleType {
    SimpleType::first_order(2)
}

type Uncurried = dyn Fn(&[Value]) -> Result<Value, LambdaError> + Send + Sync;

fn curry(n: usize, f: Arc<Uncurried>) -> Value {
    fn go(n: usize, have: Vec<Value>, f: Arc<Uncurried>) -> Value {
        Value::func(move |x| {
            let mut next = have.clone();
            next.push(x);
            if next.len() == n {
                f(&next)
            } else {
                Ok(go(n, next, f.clone()))
            }
        })
    }
    go(n, Vec::new(), f)
}

fn strs(args: &[Value]) -> Result<Vec<&BitString>, LambdaError> {
    args.iter().map(Value::as_str).collect()
}

fn first_order(
    c: &mut Constants,
    name: &str,
    k: usize,
    f: impl Fn(&[&BitString]) -> BitString + Send + Sync + 'static,
) {
    let v = if k == 0 {
        Value::Str(f(&[]))
    } else {
        curry(k, Arc::new(move |args| Ok(Value::Str(f(&strs(args)?)))))
    };
    c.insert(name, SimpleType::first_order(k), v);
}

/// Recursion-style constant `(0→0→0) → 0 → X → 0 → 0` where the third
/// argument is a string (`Rec`, `Tdrv`, `S`) or a function (`RecPrime`).
fn recursor(
    c: &mut Constants,
    name: &str,
    third: SimpleType,
    f: impl Fn(&Value, &BitString, &Value, &BitString) -> Result<BitString, LambdaError> + Send + Sync + 'static,
) {
    let ty = SimpleType::function([f2(), g(), third, g()]);
    let v = curry(4, Arc::new(move |a| Ok(Value::Str(f(&a[0], a[1].as_str()?, &a[2], a[3].as_str()?)?))));
    c.insert(name, ty, v);
}

fn build_library() -> Constants {
    let mut c = Constants::new();
    first_order(&mut c, "eps", 0, |_| BitString::empty());
    first_order(&mut c, "pair", 2, |a| pair(a[0], a[1]));
    first_order(&mut c, "pi1", 1, |a| proj1(a[0]));
    first_order(&mut c, "pi2", 1, |a| proj2(a[0]));
    first_order(&mut c, "triple", 3, |a| triple(a[0], a[1], a[2]));
    first_order(&mut c, "pi13", 1, |a| untriple(a[0]).0);
    first_order(&mut c, "pi23", 1, |a| untriple(a[0]).1);
    first_order(&mut c, "pi33", 1, |a| untriple(a[0]).2);
    first_order(&mut c, "concat", 2, |a| a[0].concat(a[1]));
    first_order(&mut c, "trunc", 2, |a| a[0].truncate(a[1].len()));
    first_order(&mut c, "unary", 1, |a| BitString::ones(a[0].len()));
    first_order(&mut c, "append1", 1, |a| {
        let mut s = a[0].clone();
        s.push(true);
        s
    });
    // ℓ(s, t) = s if |s| ≤ |t|, else t
    first_order(&mut c, "ell", 2, |a| if a[0].len() <= a[1].len() { a[0].clone() } else { a[1].clone() });

    recursor(&mut c, "Rec", g(), |phi, a, b, cc| {
        try_rec_ref(|x, y| phi.call_str(&[x, y]), a, b.as_str()?, cc)
    });
    recursor(&mut c, "RecPrime", f1(), |phi, a, psi, cc| {
        try_rec_prime_ref(|x, y| phi.call_str(&[x, y]), a, |x| psi.call_str(&[x]), cc)
    });
    recursor(&mut c, "Tdrv", g(), |psi, a, b, cc| {
        t_driver_ref(|x, y| psi.call_str(&[x, y]), a, b.as_str()?, cc)
    });
    recursor(&mut c, "S", g(), |phi, t, b, d| s_ref(|x, y| phi.call_str(&[x, y]), t, b.as_str()?, d));

    // M(ψ, s, t)
    c.insert(
        "M",
        SimpleType::function([f1(), g(), g()]),
        curry(
            3,
            Arc::new(|a| {
                let psi = a[0].clone();
                let mut err = None;
                let mut call = |x: &BitString| {
                    psi.call_str(&[x]).unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        BitString::empty()
                    })
                };
                let out = argmax_step(&mut call, a[1].as_str()?, a[2].as_str()?);
                err.map_or(Ok(Value::Str(out)), Err)
            }),
        ),
    );

    // 𝖱(ψ)(⟨a, b, c⟩) = Rec(λxy.ψ⟨x,y⟩, a, b, c)
    c.insert(
        "R",
        SimpleType::function([f1(), g()]),
        curry(
            2,
            Arc::new(|a| {
                let (x, y, z) = untriple(a[1].as_str()?);
                let psi = &a[0];
                Ok(Value::Str(try_rec_ref(|s, t| psi.call_str(&[&pair(s, t)]), &x, &y, &z)?))
            }),
        ),
    );

    // T(φ)(a) = ⟨φ(ε), a⟩
    c.insert(
        "Tup",
        SimpleType::function([f1(), g()]),
        curry(2, Arc::new(|a| Ok(Value::Str(pair(&a[0].call_str(&[&BitString::empty()])?, a[1].as_str()?))))),
    );

    // K_ψ(φ) = ψ
    let konst =
        |psi: fn(&BitString) -> BitString| curry(2, Arc::new(move |a| Ok(Value::Str(psi(a[1].as_str()?)))));
    c.insert("K_append1", SimpleType::function([f1(), g()]), konst(|s| s.concat(&BitString::ones(1))));
    c.insert("K_concat", SimpleType::function([f1(), g()]), konst(|s| proj1(s).concat(&proj2(s))));
    c
}

/// Names accepted by [`bridge_term`].
pub const BRIDGE_TERMS: &[&str] = &[
    "rec_via_recprime",
    "recprime_via_rec",
    "operator_R",
    "const_K",
    "tupler_T",
    "rec_symbol_replacement",
    "argmax_via_T",
    "filr_as_rec",
];

pub fn bridge_source(name: &str) -> Option<&'static str> {
    Some(match name {
        // Rec(φ,a,b,c) = Rec′(λsλt.φ(s,t)^{≤|b|}, a, λs.b, c)
        "rec_via_recprime" => {
            r"\phi:0->0->0. \a:0. \b:0. \c:0. #RecPrime (\s:0. \t:0. #trunc (phi s t) b) a (\s:0. b) c"
        }
        // Rec′(φ,a,ψ,c) = Rec(λsλt.ℓ(φ(s,t),ψ(s)), a, ψ(F′(ψ,c)), c)
        "recprime_via_rec" => {
            r"\phi:0->0->0. \a:0. \psi:0->0. \c:0.
              #Rec (\s:0. \t:0. #ell (phi s t) (psi s)) a
                   (psi (#Rec (\s:0. \t:0. #M psi s t) #eps c c)) c"
        }
        "operator_R" => r"\psi:0->0. \x:0. #Rec (\b:0. \c:0. psi (#pair b c)) (#pi13 x) (#pi23 x) (#pi33 x)",
        "const_K" => r"\a:0. #K_append1 (\b:0. b) a",
        "tupler_T" => r"\a:0. \b:0. #K_concat (\c:0. c) (#Tup (\d:0. a) b)",
        "rec_symbol_replacement" => {
            r"\phi:0->0->0. \a:0. \b:0. \c:0. #R (\d:0. phi (#pi1 d) (#pi2 d)) (#triple a b c)"
        }
        "argmax_via_T" => r"\phi:0->0. \a:0. #unary (phi (#Tdrv (\d:0. \t:0. #M phi d t) #eps a a))",
        "filr_as_rec" => r"\phi:0->0. \a:0. #Rec (\s:0. \t:0. phi (phi t)) #eps (phi #eps) a",
        _ => return None,
    })
}

/// The closed bridge term `name`, bound to the library constants.
pub fn bridge_term(name: &str) -> Result<Term, LambdaError> {
    let src = bridge_source(name).ok_or_else(|| LambdaError::UnknownBridge(name.to_string()))?;
    parse_term(src, Constants::library(), &BTreeMap::new())
}
