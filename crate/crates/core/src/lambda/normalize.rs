use std::collections::BTreeMap;

use super::term::Term;
use super::types::SimpleType;

fn fresh(base: &str, avoid: &BTreeMap<String, SimpleType>, also: &BTreeMap<String, SimpleType>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains_key(&name) || also.contains_key(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding `t[x := s]`.
pub fn substitute(t: &Term, x: &str, s: &Term) -> Term {
    match t {
        Term::Var(y, _) if y == x => s.clone(),
        Term::Var(..) | Term::Const(..) => t.clone(),
        Term::App(f, a) => Term::app(substitute(f, x, s), substitute(a, x, s)),
        Term::Abs(y, _, _) if y == x => t.clone(),
        Term::Abs(y, ty, body) => {
            let fs = s.free_vars();
            if fs.contains_key(y) && body.is_free(x) {
                let y2 = fresh(y, &fs, &body.free_vars());
                let body = substitute(body, y, &Term::Var(y2.clone(), ty.clone()));
                Term::abs(&y2, ty.clone(), substitute(&body, x, s))
            } else {
                Term::abs(y, ty.clone(), substitute(body, x, s))
            }
        }
    }
}

/// One leftmost-outermost β or η contraction.
pub fn step(t: &Term) -> Option<Term> {
    match t {
        Term::App(f, a) => {
            if let Term::Abs(x, _, body) = f.as_ref() {
                return Some(substitute(body, x, a));
            }
            step(f)
                .map(|f2| Term::app(f2, (**a).clone()))
                .or_else(|| step(a).map(|a2| Term::app((**f).clone(), a2)))
        }
        Term::Abs(x, ty, body) => {
            if let Term::App(f, a) = body.as_ref() {
                if matches!(a.as_ref(), Term::Var(y, _) if y == x) && !f.is_free(x) {
                    return Some((**f).clone());
                }
            }
            step(body).map(|b| Term::abs(x, ty.clone(), b))
        }
        _ => None,
    }
}

/// β/η normal form; terminates on well-typed terms.
pub fn beta_eta_normalize(t: &Term) -> Term {
    let mut cur = t.clone();
    while let Some(next) = step(&cur) {
        cur = next;
    }
    cur
}

pub fn is_normal(t: &Term) -> bool {
    step(t).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::library::Constants;
    use crate::lambda::parse::parse_term;

    fn p(s: &str) -> Term {
        let free = [("F".to_string(), SimpleType::first_order(1)), ("y".to_string(), SimpleType::Ground)]
            .into_iter()
            .collect();
        parse_term(s, Constants::library(), &free).unwrap()
    }

    #[test]
    fn beta() {
        assert_eq!(beta_eta_normalize(&p(r"(\x:0. x) #eps")), p("#eps"));
    }

    #[test]
    fn eta() {
        assert_eq!(beta_eta_normalize(&p(r"\x:0. F x")), p("F"));
        let keep = p(r"\x:0. #pair x x");
        assert_eq!(beta_eta_normalize(&keep), p(r"\x:0. #pair x x"));
    }

    #[test]
    fn substitution_avoids_capture() {
        let redex = p(r"(\x:0. \y:0. #pair x y) y");
        let t = step(&redex).unwrap();
        assert_eq!(t.to_string(), r"\y':0. #pair y y'");
        assert_eq!(beta_eta_normalize(&redex).to_string(), "#pair y");
    }
}
