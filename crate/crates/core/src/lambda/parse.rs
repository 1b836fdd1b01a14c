//! Surface syntax: `\x:0. x`, application by juxtaposition, constants `#name`,
//! types built from `0` and right-associative `->`.

use std::collections::BTreeMap;

use super::library::Constants;
use super::term::Term;
use super::types::SimpleType;
use super::LambdaError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Lambda,
    Colon,
    Dot,
    Open,
    Close,
    Arrow,
    Zero,
    Ident(String),
    Const(String),
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, LambdaError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let single = match c {
            '\\' | 'λ' => Some(Tok::Lambda),
            ':' => Some(Tok::Colon),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            _ => None,
        };
        if let Some(t) = single {
            out.push((pos, t));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '-' && chars.get(i + 1).map(|p| p.1) == Some('>') {
            out.push((pos, Tok::Arrow));
            i += 2;
        } else if c == '#' || is_ident(c) {
            let start = if c == '#' { i + 1 } else { i };
            let mut j = start;
            while j < chars.len() && is_ident(chars[j].1) {
                j += 1;
            }
            let word: String = chars[start..j].iter().map(|p| p.1).collect();
            if word.is_empty() {
                return Err(LambdaError::Parse { pos, msg: "empty constant name".into() });
            }
            out.push((
                pos,
                if c == '#' {
                    Tok::Const(word)
                } else if word == "0" {
                    Tok::Zero
                } else if word.starts_with(|ch: char| ch.is_ascii_digit()) {
                    return Err(LambdaError::Parse { pos, msg: format!("bad identifier {word}") });
                } else {
                    Tok::Ident(word)
                },
            ));
            i = j;
        } else {
            return Err(LambdaError::Parse { pos, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    consts: &'a Constants,
    scope: Vec<(String, SimpleType)>,
    free: &'a BTreeMap<String, SimpleType>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LambdaError> {
        Err(LambdaError::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok) -> Result<(), LambdaError> {
        if self.peek() == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected {t:?}"))
        }
    }

    fn ty(&mut self) -> Result<SimpleType, LambdaError> {
        let head = match self.peek() {
            Some(Tok::Zero) => {
                self.at += 1;
                SimpleType::Ground
            }
            Some(Tok::Open) => {
                self.at += 1;
                let t = self.ty()?;
                self.expect(Tok::Close)?;
                t
            }
            _ => return self.err("expected a type"),
        };
        if self.peek() == Some(&Tok::Arrow) {
            self.at += 1;
            Ok(SimpleType::arrow(head, self.ty()?))
        } else {
            Ok(head)
        }
    }

    fn term(&mut self) -> Result<Term, LambdaError> {
        if self.peek() == Some(&Tok::Lambda) {
            self.at += 1;
            let Some(Tok::Ident(x)) = self.peek().cloned() else {
                return self.err("expected a variable after λ");
            };
            self.at += 1;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            self.expect(Tok::Dot)?;
            self.scope.push((x.clone(), ty.clone()));
            let body = self.term();
            self.scope.pop();
            return Ok(Term::abs(&x, ty, body?));
        }
        let mut f = self.atom()?;
        loop {
            match self.peek() {
                Some(Tok::Lambda) => return Ok(Term::app(f, self.term()?)),
                Some(Tok::Ident(_) | Tok::Const(_) | Tok::Open) => f = Term::app(f, self.atom()?),
                _ => return Ok(f),
            }
        }
    }

    fn atom(&mut self) -> Result<Term, LambdaError> {
        match self.peek().cloned() {
            Some(Tok::Ident(x)) => {
                let ty = match self.scope.iter().rev().find(|(n, _)| *n == x) {
                    Some((_, t)) => t.clone(),
                    None => match self.free.get(&x) {
                        Some(t) => t.clone(),
                        None => return self.err(format!("unbound variable {x}")),
                    },
                };
                self.at += 1;
                Ok(Term::Var(x, ty))
            }
            Some(Tok::Const(c)) => {
                let Some((ty, _)) = self.consts.get(&c) else {
                    return self.err(format!("unknown constant #{c}"));
                };
                self.at += 1;
                Ok(Term::Const(c, ty.clone()))
            }
            Some(Tok::Open) => {
                self.at += 1;
                let t = self.term()?;
                self.expect(Tok::Close)?;
                Ok(t)
            }
            _ => self.err("expected a term"),
        }
    }
}

/// Parses and type-checks a term. Free variables take their types from `free`.
pub fn parse_term(
    src: &str,
    consts: &Constants,
    free: &BTreeMap<String, SimpleType>,
) -> Result<Term, LambdaError> {
    let mut p = Parser { toks: lex(src)?, at: 0, end: src.len(), consts, scope: Vec::new(), free };
    let t = p.term()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    t.type_of()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<SimpleType, LambdaError> {
    let empty = BTreeMap::new();
    let consts = Constants::new();
    let mut p =
        Parser { toks: lex(src)?, at: 0, end: src.len(), consts: &consts, scope: Vec::new(), free: &empty };
    let t = p.ty()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(t)
}
