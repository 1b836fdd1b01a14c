use super::eval::{eval_term, Assignment, Value};
use super::term::Term;
use super::types::SimpleType;
use super::LambdaError;

/// A closed term kept in a section, with its value.
#[derive(Clone)]
pub struct SectionMember {
    pub term: Term,
    pub ty: SimpleType,
    pub value: Value,
}

impl SectionMember {
    pub fn call(&self, args: impl IntoIterator<Item = Value>) -> Result<Value, LambdaError> {
        self.value.call(args)
    }
}

/// Arguments of type 0 or `0 → … → 0`, with at least one argument.
fn is_section_shape(ty: &SimpleType, order: usize) -> bool {
    let args = ty.args();
    !args.is_empty()
        && ty.level() <= order
        && args.iter().all(|a| a.is_ground() || a.args().iter().all(|b| b.is_ground()))
}

/// The members of `terms` denoting type-1 functions (`order = 1`) or type-2
/// functionals (`order = 2`). Open or ill-typed terms are skipped.
pub fn section(terms: &[Term], order: usize) -> Vec<SectionMember> {
    terms
        .iter()
        .filter(|t| t.is_closed())
        .filter_map(|t| {
            let ty = t.type_of().ok()?;
            if !is_section_shape(&ty, order) {
                return None;
            }
            let value = eval_term(t, &Assignment::new()).ok()?;
            Some(SectionMember { term: t.clone(), ty, value })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::library::{bridge_term, BRIDGE_TERMS};
    use crate::lambda::parse::parse_term;
    use crate::strings::bits;

    fn p(s: &str) -> Term {
        parse_term(s, crate::lambda::Constants::library(), &Default::default()).unwrap()
    }

    #[test]
    fn one_section() {
        let s = section(&[p(r"\a:0. a"), p(r"\f:0->0. f #eps")], 1);
        assert_eq!(s.len(), 1);
        let out = s[0].call([Value::Str(bits("101"))]).unwrap();
        assert_eq!(out.into_str().unwrap(), bits("101"));
    }

    #[test]
    fn bridge_terms_in_two_section() {
        let terms: Vec<Term> = BRIDGE_TERMS.iter().map(|n| bridge_term(n).unwrap()).collect();
        assert_eq!(section(&terms, 2).len(), terms.len());
        let one = section(&terms, 1);
        assert!(one.iter().all(|m| m.ty.level() == 1));
        assert_eq!(one.len(), 2);
    }
}
