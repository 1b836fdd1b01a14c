//! Executable second-order complexity: an instrumented oracle-machine
//! interpreter, revision accounting, second-order polynomial bounds, machine
//! transformations, adversarial oracles and a typed λ-calculus.

pub mod corpus;
pub mod lambda;
pub mod operators;
pub mod otm;
pub mod sopoly;
pub mod strings;
pub mod transforms;

pub use otm::{Machine, Oracle, RunMetrics, Trace};
pub use sopoly::{Sop, UnaryPolynomial};
pub use strings::{bits, BitString};
