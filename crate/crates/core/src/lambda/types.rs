use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SimpleType {
    Ground,
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(from: SimpleType, to: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(from), Box::new(to))
    }

    /// `τ_1 → … → τ_k → 0` from the argument list.
    pub fn function(args: impl IntoIterator<Item = SimpleType>) -> SimpleType {
        let args: Vec<SimpleType> = args.into_iter().collect();
        args.into_iter().rev().fold(SimpleType::Ground, |acc, a| SimpleType::arrow(a, acc))
    }

    /// `0 → … → 0` with `k` arguments.
    pub fn first_order(k: usize) -> SimpleType {
        SimpleType::function(std::iter::repeat_n(SimpleType::Ground, k))
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, SimpleType::Ground)
    }

    /// Argument types `τ_1, …, τ_k` of the normal form.
    pub fn args(&self) -> Vec<&SimpleType> {
        let mut out = Vec::new();
        let mut t = self;
        while let SimpleType::Arrow(a, b) = t {
            out.push(a.as_ref());
            t = b;
        }
        out
    }

    pub fn level(&self) -> usize {
        self.args().iter().map(|a| a.level() + 1).max().unwrap_or(0)
    }

    pub fn depth(&self) -> usize {
        match self {
            SimpleType::Ground => 0,
            SimpleType::Arrow(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Ground => write!(f, "0"),
            SimpleType::Arrow(a, b) if a.is_ground() => write!(f, "0 -> {b}"),
            SimpleType::Arrow(a, b) => write!(f, "({a}) -> {b}"),
        }
    }
}
