//! Second-order polynomials, unary step-count polynomials and the bounds
//! built from them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {found:?} at offset {offset}")]
    Unexpected { found: char, offset: usize },
    #[error("unexpected end of input")]
    Eof,
    #[error("{0} is not allowed in a unary polynomial")]
    NotUnary(&'static str),
}

/// A unary size function `l: ℕ → ℕ`.
pub trait SizeFunction {
    fn size(&self, n: &BigUint) -> BigUint;
}

impl<F: Fn(&BigUint) -> BigUint> SizeFunction for F {
    fn size(&self, n: &BigUint) -> BigUint {
        self(n)
    }
}

/// Polynomial with natural coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct UnaryPolynomial {
    coeffs: Vec<u64>,
}

impl UnaryPolynomial {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UnaryPolynomial { coeffs }
    }

    pub fn constant(c: u64) -> Self {
        Self::new(vec![c])
    }

    /// `n`
    pub fn identity() -> Self {
        Self::new(vec![0, 1])
    }

    /// `c·(n+1)^d`
    pub fn scaled_shifted_power(c: u64, d: u32) -> Self {
        let mut p = Self::constant(1);
        let base = Self::new(vec![1, 1]);
        for _ in 0..d {
            p = p.mul(&base);
        }
        p.scale(c)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let c = (0..len)
            .map(|i| self.coeffs.get(i).copied().unwrap_or(0) + other.coeffs.get(i).copied().unwrap_or(0))
            .collect();
        Self::new(c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::default();
        }
        let mut c = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn eval(&self, n: &BigUint) -> BigUint {
        self.coeffs.iter().rev().fold(BigUint::zero(), |acc, c| acc * n + BigUint::from(*c))
    }

    pub fn eval_u64(&self, n: u64) -> BigUint {
        self.eval(&BigUint::from(n))
    }

    /// Evaluation clamped into `usize`, for building strings of that length.
    pub fn eval_usize(&self, n: usize) -> Option<usize> {
        self.eval(&BigUint::from(n)).to_usize()
    }

    /// The unary polynomial as a second-order polynomial in `arg`.
    pub fn to_sop(&self, arg: &Sop) -> Sop {
        let mut acc: Option<Sop> = None;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            // Horner: acc = acc*arg + c
            let prev = acc.map(|a| Sop::times(a, arg.clone()));
            let term = if *c == 0 { None } else { Some(Sop::constant(*c)) };
            acc = match (prev, term) {
                (Some(p), Some(t)) => Some(Sop::plus(p, t)),
                (Some(p), None) => Some(p),
                (None, Some(t)) => Some(t),
                (None, None) if i > 0 => None,
                (None, None) => Some(Sop::Zero),
            };
        }
        acc.unwrap_or(Sop::Zero)
    }
}

impl SizeFunction for UnaryPolynomial {
    fn size(&self, n: &BigUint) -> BigUint {
        self.eval(n)
    }
}

impl fmt::Display for UnaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("n")?,
                (1, c) => write!(f, "{c}n")?,
                (i, 1) => write!(f, "n^{i}")?,
                (i, c) => write!(f, "{c}n^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for UnaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnaryPolynomial({self})")
    }
}

impl FromStr for UnaryPolynomial {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let sop = Parser::new(s, true).parse_all()?;
        Ok(sop_to_unary(&sop).expect("unary parser never emits l(..)"))
    }
}

impl Serialize for UnaryPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for UnaryPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Second-order polynomial AST.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Sop {
    Zero,
    One,
    N,
    Plus(Box<Sop>, Box<Sop>),
    Times(Box<Sop>, Box<Sop>),
    /// `l(P)`
    Apply(Box<Sop>),
}

impl Sop {
    pub fn plus(a: Sop, b: Sop) -> Sop {
        Sop::Plus(Box::new(a), Box::new(b))
    }

    pub fn times(a: Sop, b: Sop) -> Sop {
        Sop::Times(Box::new(a), Box::new(b))
    }

    pub fn apply(a: Sop) -> Sop {
        Sop::Apply(Box::new(a))
    }

    /// The natural number `c` built from `1`, `+` and `*` by binary expansion.
    pub fn constant(c: u64) -> Sop {
        match c {
            0 => Sop::Zero,
            1 => Sop::One,
            c => {
                let half = Sop::times(Sop::plus(Sop::One, Sop::One), Sop::constant(c / 2));
                if c % 2 == 1 {
                    Sop::plus(half, Sop::One)
                } else {
                    half
                }
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Sop::Zero | Sop::One | Sop::N => 1,
            Sop::Plus(a, b) | Sop::Times(a, b) => 1 + a.size() + b.size(),
            Sop::Apply(a) => 1 + a.size(),
        }
    }

    pub fn eval(&self, l: &dyn SizeFunction, n: &BigUint) -> BigUint {
        match self {
            Sop::Zero => BigUint::zero(),
            Sop::One => BigUint::one(),
            Sop::N => n.clone(),
            Sop::Plus(a, b) => a.eval(l, n) + b.eval(l, n),
            Sop::Times(a, b) => a.eval(l, n) * b.eval(l, n),
            Sop::Apply(a) => l.size(&a.eval(l, n)),
        }
    }
}

impl fmt::Display for Sop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(s: &Sop, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match s {
                Sop::Zero => f.write_str("0"),
                Sop::One => f.write_str("1"),
                Sop::N => f.write_str("n"),
                Sop::Apply(a) => {
                    f.write_str("l(")?;
                    go(a, 0, f)?;
                    f.write_str(")")
                }
                Sop::Plus(a, b) => {
                    if prec > 0 {
                        f.write_str("(")?;
                    }
                    go(a, 0, f)?;
                    f.write_str("+")?;
                    go(b, 0, f)?;
                    if prec > 0 {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
                Sop::Times(a, b) => {
                    go(a, 1, f)?;
                    f.write_str("*")?;
                    go(b, 1, f)
                }
            }
        }
        go(self, 0, f)
    }
}

impl fmt::Debug for Sop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sop({self})")
    }
}

impl FromStr for Sop {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser::new(s, false).parse_all()
    }
}

pub fn eval_sop(p: &Sop, l: &dyn SizeFunction, n: &BigUint) -> BigUint {
    p.eval(l, n)
}

fn sop_to_unary(p: &Sop) -> Option<UnaryPolynomial> {
    Some(match p {
        Sop::Zero => UnaryPolynomial::default(),
        Sop::One => UnaryPolynomial::constant(1),
        Sop::N => UnaryPolynomial::identity(),
        Sop::Plus(a, b) => sop_to_unary(a)?.add(&sop_to_unary(b)?),
        Sop::Times(a, b) => sop_to_unary(a)?.mul(&sop_to_unary(b)?),
        Sop::Apply(_) => return None,
    })
}

/// `p(n) := P(l_n, n)` where `l_n` is the constant function with value `n`.
pub fn step_count_from_bound(p: &Sop) -> UnaryPolynomial {
    fn collapse(p: &Sop) -> Sop {
        match p {
            Sop::Zero | Sop::One | Sop::N => p.clone(),
            Sop::Plus(a, b) => Sop::plus(collapse(a), collapse(b)),
            Sop::Times(a, b) => Sop::times(collapse(a), collapse(b)),
            Sop::Apply(_) => Sop::N,
        }
    }
    sop_to_unary(&collapse(p)).expect("collapsed polynomial has no applications")
}

/// `(p∘l)^r(p(n)) + p(n)`
pub fn mpt_time_bound(p: &UnaryPolynomial, r: usize) -> Sop {
    let base = p.to_sop(&Sop::N);
    let mut x = base.clone();
    for _ in 0..r {
        x = p.to_sop(&Sop::apply(x));
    }
    Sop::plus(x, base)
}

/// `C·(P(l, q)·q + 1)` with `q := Q(P(l,·), n)`.
pub fn composition_bound(p: &Sop, q: &Sop, c: u64, l: &dyn SizeFunction, n: &BigUint) -> BigUint {
    let inner = |m: &BigUint| p.eval(l, m);
    let qv = q.eval(&inner, n);
    BigUint::from(c) * (p.eval(l, &qv) * &qv + BigUint::one())
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    unary: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, unary: bool) -> Self {
        Parser { src, pos: 0, unary }
    }

    fn parse_all(mut self) -> Result<Sop, ParseError> {
        let e = self.expr()?;
        self.skip_ws();
        match self.peek() {
            None => Ok(e),
            Some(c) => Err(ParseError::Unexpected { found: c, offset: self.pos }),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => Err(ParseError::Unexpected { found, offset: self.pos }),
                None => Err(ParseError::Eof),
            }
        }
    }

    fn expr(&mut self) -> Result<Sop, ParseError> {
        let mut acc = self.term()?;
        while self.eat('+') {
            acc = Sop::plus(acc, self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Sop, ParseError> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = Sop::times(acc, self.power()?);
                continue;
            }
            // Implicit multiplication, e.g. `3n` or `2(n+1)`.
            self.skip_ws();
            match self.peek() {
                Some('n') | Some('(') | Some('l') => acc = Sop::times(acc, self.power()?),
                Some(c) if c.is_ascii_digit() => acc = Sop::times(acc, self.power()?),
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Sop, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let k = self.number()?;
            let mut acc = Sop::One;
            for i in 0..k {
                acc = if i == 0 { base.clone() } else { Sop::times(acc, base.clone()) };
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.peek() {
                Some(found) => Err(ParseError::Unexpected { found, offset: self.pos }),
                None => Err(ParseError::Eof),
            };
        }
        self.src[start..self.pos].parse().map_err(|_| ParseError::Unexpected {
            found: self.src[start..].chars().next().unwrap_or(' '),
            offset: start,
        })
    }

    fn atom(&mut self) -> Result<Sop, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('n') => {
                self.pos += 1;
                Ok(Sop::N)
            }
            Some('l') => {
                if self.unary {
                    return Err(ParseError::NotUnary("l(..)"));
                }
                self.pos += 1;
                self.expect('(')?;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(Sop::apply(inner))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(Sop::constant(self.number()?)),
            Some(found) => Err(ParseError::Unexpected { found, offset: self.pos }),
            None => Err(ParseError::Eof),
        }
    }
}
