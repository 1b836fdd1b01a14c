use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::types::SimpleType;
use super::LambdaError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String, SimpleType),
    Const(String, SimpleType),
    Abs(String, SimpleType, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str, ty: SimpleType) -> Term {
        Term::Var(name.to_string(), ty)
    }

    pub fn abs(name: &str, ty: SimpleType, body: Term) -> Term {
        Term::Abs(name.to_string(), ty, Box::new(body))
    }

    pub fn app(f: Term, x: Term) -> Term {
        Term::App(Box::new(f), Box::new(x))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    /// Checks binders against variable annotations and application types.
    pub fn type_of(&self) -> Result<SimpleType, LambdaError> {
        fn go(t: &Term, ctx: &mut Vec<(String, SimpleType)>) -> Result<SimpleType, LambdaError> {
            match t {
                Term::Var(x, ty) => {
                    if let Some((_, bound)) = ctx.iter().rev().find(|(n, _)| n == x) {
                        if bound != ty {
                            return Err(LambdaError::TypeMismatch(format!(
                                "{x} is bound at {bound} but annotated {ty}"
                            )));
                        }
                    }
                    Ok(ty.clone())
                }
                Term::Const(_, ty) => Ok(ty.clone()),
                Term::Abs(x, ty, body) => {
                    ctx.push((x.clone(), ty.clone()));
                    let b = go(body, ctx);
                    ctx.pop();
                    Ok(SimpleType::arrow(ty.clone(), b?))
                }
                Term::App(f, a) => match go(f, ctx)? {
                    SimpleType::Arrow(from, to) => {
                        let at = go(a, ctx)?;
                        if *from == at {
                            Ok(*to)
                        } else {
                            Err(LambdaError::TypeMismatch(format!(
                                "argument of type {at} where {from} expected"
                            )))
                        }
                    }
                    SimpleType::Ground => {
                        Err(LambdaError::TypeMismatch(format!("{f} has type 0 and cannot be applied")))
                    }
                },
            }
        }
        go(self, &mut Vec::new())
    }

    /// Free variables with their annotated types.
    pub fn free_vars(&self) -> BTreeMap<String, SimpleType> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeMap<String, SimpleType>) {
            match t {
                Term::Var(x, ty) => {
                    if !bound.contains(x) {
                        out.insert(x.clone(), ty.clone());
                    }
                }
                Term::Const(..) => {}
                Term::Abs(x, _, body) => {
                    bound.push(x.clone());
                    go(body, bound, out);
                    bound.pop();
                }
                Term::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
            }
        }
        let mut out = BTreeMap::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_free(&self, x: &str) -> bool {
        self.free_vars().contains_key(x)
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Const(c, _) = t {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Abs(_, _, body) => body.visit(f),
            Term::App(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x, _) => write!(f, "{x}"),
            Term::Const(c, _) => write!(f, "#{c}"),
            Term::Abs(x, ty, body) => write!(f, "\\{x}:{ty}. {body}"),
            Term::App(a, b) => {
                match a.as_ref() {
                    Term::Abs(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                match b.as_ref() {
                    Term::App(..) | Term::Abs(..) => write!(f, " ({b})"),
                    _ => write!(f, " {b}"),
                }
            }
        }
    }
}
