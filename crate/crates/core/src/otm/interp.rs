use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::machine::{Instr, Machine};
use super::metrics::metrics;
use super::oracle::{FiniteTable, Oracle, OracleError};
use crate::strings::{pair, proj1, proj2, BitString};

/// Source of oracle answers for a run.
pub trait QueryPort {
    fn answer(&mut self, query: &BitString) -> Result<BitString, OracleError>;
}

impl QueryPort for &Oracle {
    fn answer(&mut self, query: &BitString) -> Result<BitString, OracleError> {
        Oracle::answer(self, query)
    }
}

impl<F: FnMut(&BitString) -> Result<BitString, OracleError>> QueryPort for F {
    fn answer(&mut self, query: &BitString) -> Result<BitString, OracleError> {
        self(query)
    }
}

/// One oracle interaction. `step` is the 1-based index of the QUERY step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryEvent {
    pub step: u64,
    pub query: BitString,
    pub answer: BitString,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub output: BitString,
    pub steps: u64,
    pub input_length: usize,
    pub events: Vec<QueryEvent>,
    /// pc of the HALT that ended the run; `None` for partial traces.
    pub halted_at: Option<usize>,
}

impl Trace {
    fn start(input: &BitString) -> Self {
        Trace {
            output: BitString::empty(),
            steps: 0,
            input_length: input.len(),
            events: Vec::new(),
            halted_at: None,
        }
    }

    pub fn query_sizes(&self) -> Vec<usize> {
        self.events.iter().map(|e| e.query.len()).collect()
    }

    pub fn answer_sizes(&self) -> Vec<usize> {
        self.events.iter().map(|e| e.answer.len()).collect()
    }

    /// Finite table agreeing with the oracle on every query of this run.
    pub fn to_table(&self) -> FiniteTable {
        let mut t = FiniteTable::new(BitString::empty());
        for e in &self.events {
            t.entries.insert(e.query.clone(), e.answer.clone());
        }
        t
    }

    /// Whether the run halted at an instruction carrying `label`.
    pub fn halted_at_label(&self, machine: &Machine, label: &str) -> bool {
        self.halted_at.is_some_and(|pc| machine.has_label_at(pc, label))
    }

    pub fn to_file(&self) -> TraceFile {
        let m = metrics(self);
        TraceFile {
            steps: self.steps,
            input_length: self.input_length,
            output: self.output.clone(),
            events: self
                .events
                .iter()
                .map(|e| TraceFileEvent {
                    step: e.step,
                    query_size: e.query.len(),
                    answer_size: e.answer.len(),
                })
                .collect(),
            lookahead_revisions: m.lookahead_revisions,
            length_revisions: m.length_revisions,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFileEvent {
    pub step: u64,
    pub query_size: usize,
    pub answer_size: usize,
}

/// Trace file format (sizes only).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub steps: u64,
    pub input_length: usize,
    pub output: BitString,
    pub events: Vec<TraceFileEvent>,
    pub lookahead_revisions: usize,
    pub length_revisions: usize,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("fuel {fuel} exhausted after {} steps", partial.steps)]
    FuelExhausted { fuel: u64, partial: Box<Trace> },
    #[error("control fell off the end of the program at pc {pc}")]
    FellOff { pc: usize, partial: Box<Trace> },
    #[error("oracle failed at step {}: {source}", partial.steps)]
    Oracle { source: OracleError, partial: Box<Trace> },
}

impl RunError {
    pub fn partial(&self) -> &Trace {
        match self {
            RunError::FuelExhausted { partial, .. }
            | RunError::FellOff { partial, .. }
            | RunError::Oracle { partial, .. } => partial,
        }
    }
}

/// Cost of executing `op` in the current register state.
pub fn instr_cost(op: &Instr<usize>, regs: &[BitString]) -> u64 {
    use Instr::*;
    let len = |r: &super::machine::Reg| regs[r.index()].len() as u64;
    match op {
        Const(_, b) => b.len() as u64 + 1,
        Copy(s, _) | Append(s, _) | LenU(s, _) | Proj1(s, _) | Proj2(s, _) => len(s) + 1,
        Trunc(l, d) => len(l).min(len(d)) + 1,
        Pair(a, b, _) => len(a) + len(b) + 1,
        AppendBit(..) | DropLast(_) | Query(..) | Jmp(_) | Jz(..) | FirstBit(..) | Halt(_) => 1,
        Jle(a, b, _) | Jeq(a, b, _) | Jprefix(a, b, _) => len(a).max(len(b)) + 1,
    }
}

/// Runs `machine` on `input` with answers from `oracle`.
pub fn run(machine: &Machine, oracle: &Oracle, input: &BitString, fuel: u64) -> Result<Trace, RunError> {
    let mut port = oracle;
    run_with_port(machine, &mut port, input, fuel)
}

pub fn run_with_port(
    machine: &Machine,
    port: &mut dyn QueryPort,
    input: &BitString,
    fuel: u64,
) -> Result<Trace, RunError> {
    use Instr::*;
    let mut regs = vec![BitString::empty(); machine.register_count()];
    regs[0] = input.clone();
    let mut trace = Trace::start(input);
    let mut pc = 0usize;
    loop {
        let Some(op) = machine.instrs().get(pc) else {
            return Err(RunError::FellOff { pc, partial: Box::new(trace) });
        };
        let cost = instr_cost(op, &regs);
        if trace.steps + cost > fuel {
            return Err(RunError::FuelExhausted { fuel, partial: Box::new(trace) });
        }
        trace.steps += cost;
        let mut next = pc + 1;
        match op {
            Const(d, b) => regs[d.index()] = b.clone(),
            Copy(s, d) => regs[d.index()] = regs[s.index()].clone(),
            Append(s, d) => {
                let src = regs[s.index()].clone();
                regs[d.index()].extend_from(&src);
            }
            AppendBit(b, d) => regs[d.index()].push(*b),
            DropLast(d) => {
                regs[d.index()].pop();
            }
            Trunc(l, d) => {
                let n = regs[l.index()].len();
                regs[d.index()].truncate_in_place(n);
            }
            LenU(s, d) => regs[d.index()] = BitString::ones(regs[s.index()].len()),
            Pair(a, b, d) => regs[d.index()] = pair(&regs[a.index()], &regs[b.index()]),
            Proj1(s, d) => regs[d.index()] = proj1(&regs[s.index()]),
            Proj2(s, d) => regs[d.index()] = proj2(&regs[s.index()]),
            Query(s, d) => {
                let query = regs[s.index()].clone();
                let answer = match port.answer(&query) {
                    Ok(a) => a,
                    Err(source) => {
                        trace.steps -= cost;
                        return Err(RunError::Oracle { source, partial: Box::new(trace) });
                    }
                };
                regs[d.index()] = answer.clone();
                trace.events.push(QueryEvent { step: trace.steps, query, answer });
            }
            Jmp(t) => next = *t,
            Jz(r, t) => {
                if regs[r.index()].is_empty() {
                    next = *t;
                }
            }
            Jle(a, b, t) => {
                if regs[a.index()].len() <= regs[b.index()].len() {
                    next = *t;
                }
            }
            Jeq(a, b, t) => {
                if regs[a.index()] == regs[b.index()] {
                    next = *t;
                }
            }
            Jprefix(a, b, t) => {
                if regs[a.index()].is_prefix_of(&regs[b.index()]) {
                    next = *t;
                }
            }
            FirstBit(r, t0, t1) => match regs[r.index()].first() {
                Some(false) => next = *t0,
                Some(true) => next = *t1,
                None => {}
            },
            Halt(r) => {
                trace.output = std::mem::take(&mut regs[r.index()]);
                trace.halted_at = Some(pc);
                return Ok(trace);
            }
        }
        pc = next;
    }
}
