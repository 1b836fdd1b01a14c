use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::library::Constants;
use super::term::Term;
use super::types::SimpleType;
use super::LambdaError;
use crate::otm::Oracle;
use crate::strings::BitString;

type HostFn = dyn Fn(Value) -> Result<Value, LambdaError> + Send + Sync;

/// Semantic value: a string at type 0, a host callable otherwise.
#[derive(Clone)]
pub enum Value {
    Str(BitString),
    Fun(Arc<HostFn>),
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => write!(f, "Str({s})"),
            Value::Fun(_) => write!(f, "Fun(..)"),
        }
    }
}

impl From<BitString> for Value {
    fn from(s: BitString) -> Self {
        Value::Str(s)
    }
}

impl Value {
    pub fn func(f: impl Fn(Value) -> Result<Value, LambdaError> + Send + Sync + 'static) -> Value {
        Value::Fun(Arc::new(f))
    }

    /// A string function of type `0 → 0`.
    pub fn unary(f: impl Fn(&BitString) -> Result<BitString, LambdaError> + Send + Sync + 'static) -> Value {
        Value::func(move |x| Ok(Value::Str(f(x.as_str()?)?)))
    }

    /// A string function of type `0 → 0 → 0`.
    pub fn binary(
        f: impl Fn(&BitString, &BitString) -> Result<BitString, LambdaError> + Send + Sync + 'static,
    ) -> Value {
        let f = Arc::new(f);
        Value::func(move |x| {
            let x = x.as_str()?.clone();
            let f = f.clone();
            Ok(Value::unary(move |y| f(&x, y)))
        })
    }

    /// `φ` as a value of type `0 → 0`.
    pub fn oracle(o: Oracle) -> Value {
        Value::unary(move |q| Ok(o.answer(q)?))
    }

    /// `φ(x, y) = ψ(⟨x, y⟩)` as a value of type `0 → 0 → 0`.
    pub fn paired_oracle(o: Oracle) -> Value {
        Value::binary(move |x, y| Ok(o.answer(&crate::strings::pair(x, y))?))
    }

    pub fn as_str(&self) -> Result<&BitString, LambdaError> {
        match self {
            Value::Str(s) => Ok(s),
            Value::Fun(_) => Err(LambdaError::NotAString),
        }
    }

    pub fn into_str(self) -> Result<BitString, LambdaError> {
        match self {
            Value::Str(s) => Ok(s),
            Value::Fun(_) => Err(LambdaError::NotAString),
        }
    }

    pub fn apply(&self, arg: Value) -> Result<Value, LambdaError> {
        match self {
            Value::Fun(f) => f(arg),
            Value::Str(_) => Err(LambdaError::NotAFunction),
        }
    }

    pub fn call(&self, args: impl IntoIterator<Item = Value>) -> Result<Value, LambdaError> {
        args.into_iter().try_fold(self.clone(), |f, a| f.apply(a))
    }

    /// Applies to string arguments and expects a string back.
    pub fn call_str(&self, args: &[&BitString]) -> Result<BitString, LambdaError> {
        self.call(args.iter().map(|a| Value::Str((*a).clone())))?.into_str()
    }
}

/// Typed bindings for free variables.
#[derive(Clone, Default)]
pub struct Assignment {
    bindings: BTreeMap<String, (SimpleType, Value)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `x`; string values must have type 0 and callables an arrow type.
    pub fn bind(&mut self, x: &str, ty: SimpleType, v: Value) -> Result<(), LambdaError> {
        match (&v, ty.is_ground()) {
            (Value::Str(_), true) | (Value::Fun(_), false) => {
                self.bindings.insert(x.to_string(), (ty, v));
                Ok(())
            }
            _ => Err(LambdaError::TypeMismatch(format!("value for {x} does not have type {ty}"))),
        }
    }

    pub fn with(mut self, x: &str, ty: SimpleType, v: Value) -> Result<Self, LambdaError> {
        self.bind(x, ty, v)?;
        Ok(self)
    }

    pub fn with_str(self, x: &str, s: BitString) -> Self {
        self.with(x, SimpleType::Ground, Value::Str(s)).expect("ground binding")
    }

    pub fn get(&self, x: &str) -> Option<&(SimpleType, Value)> {
        self.bindings.get(x)
    }
}

/// Valuation against the library constants.
pub fn eval_term(t: &Term, env: &Assignment) -> Result<Value, LambdaError> {
    eval_term_with(t, env, Constants::library())
}

pub fn eval_term_with(t: &Term, env: &Assignment, consts: &Constants) -> Result<Value, LambdaError> {
    t.type_of()?;
    for (x, ty) in t.free_vars() {
        match env.get(&x) {
            None => return Err(LambdaError::Unbound(x)),
            Some((bound, _)) if *bound != ty => {
                return Err(LambdaError::TypeMismatch(format!("{x} is assigned {bound} but used at {ty}")))
            }
            _ => {}
        }
    }
    for c in t.constants() {
        if consts.get(&c).is_none() {
            return Err(LambdaError::UnknownConstant(c));
        }
    }
    let locals: BTreeMap<String, Value> =
        env.bindings.iter().map(|(k, (_, v))| (k.clone(), v.clone())).collect();
    eval(t, &Arc::new(locals), &Arc::new(consts.clone()))
}

fn eval(t: &Term, env: &Arc<BTreeMap<String, Value>>, consts: &Arc<Constants>) -> Result<Value, LambdaError> {
    match t {
        Term::Var(x, _) => env.get(x).cloned().ok_or_else(|| LambdaError::Unbound(x.clone())),
        Term::Const(c, ty) => {
            let (cty, v) = consts.get(c).ok_or_else(|| LambdaError::UnknownConstant(c.clone()))?;
            if cty != ty {
                return Err(LambdaError::TypeMismatch(format!("#{c} has type {cty}, used at {ty}")));
            }
            Ok(v.clone())
        }
        Term::Abs(x, _, body) => {
            let (x, body, env, consts) = (x.clone(), Arc::new((**body).clone()), env.clone(), consts.clone());
            Ok(Value::func(move |arg| {
                let mut inner = (*env).clone();
                inner.insert(x.clone(), arg);
                eval(&body, &Arc::new(inner), &consts)
            }))
        }
        Term::App(f, a) => {
            let fv = eval(f, env, consts)?;
            let av = eval(a, env, consts)?;
            fv.apply(av)
        }
    }
}
