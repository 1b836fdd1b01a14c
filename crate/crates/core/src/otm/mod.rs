//! Oracle-machine IR, interpreter, revision metrics and step-count checks.

pub mod brute;
pub mod interp;
pub mod machine;
pub mod metrics;
pub mod oracle;
pub mod parse;

pub use brute::{brute_force_step_count, BruteForceError};
pub use interp::{run, run_with_port, QueryEvent, QueryPort, RunError, Trace, TraceFile};
pub use machine::{Instr, Line, Machine, MachineError, Program, Reg};
pub use metrics::{check_step_count_ks, check_step_count_plain, metrics, RunMetrics};
pub use oracle::{oracle_size, BuiltinRule, EnumerationRefused, FiniteTable, Oracle, OracleError};
pub use parse::{parse_machine_text, ParseError};
