//! Simply-typed λ-calculus over string functionals.

pub mod eval;
pub mod gen;
pub mod library;
pub mod normalize;
pub mod parse;
pub mod section;
pub mod term;
pub mod types;

use thiserror::Error;

pub use eval::{eval_term, eval_term_with, Assignment, Value};
pub use library::{bridge_source, bridge_term, Constants, BRIDGE_TERMS};
pub use normalize::{beta_eta_normalize, substitute};
pub use parse::{parse_term, parse_type};
pub use section::{section, SectionMember};
pub use term::Term;
pub use types::SimpleType;

#[derive(Debug, Error)]
pub enum LambdaError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("unregistered constant #{0}")]
    UnknownConstant(String),
    #[error("unknown bridge term {0}")]
    UnknownBridge(String),
    #[error("expected a string value")]
    NotAString,
    #[error("applied a string value")]
    NotAFunction,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Oracle(#[from] crate::otm::OracleError),
}

/// `level(τ)`.
pub fn type_level(t: &SimpleType) -> usize {
    t.level()
}
