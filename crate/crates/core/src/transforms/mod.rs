//! Machine-to-machine constructions and adversarial oracles.

pub mod adversary;
pub mod builder;
pub mod compose;
pub mod factorize;
pub mod spt;

pub use adversary::{
    filr_adversary, filr_adversary_m, filr_adversary_with, iteration_adversary, selfcomp_adversary,
    AdversaryError, FilrAdversary, FilrReading,
};
pub use builder::{is_budget_violation, query_size_bound, BUDGET_VIOLATION_LABEL};
pub use compose::{budgeted_compose, inline_compose, primed_inner, tag_queries};
pub use factorize::{factorize, mtilde_oracle, run_factored, Factorization, Message};
pub use spt::spt_to_mpt;
