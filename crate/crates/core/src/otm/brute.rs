use std::collections::BTreeMap;

use thiserror::Error;

use super::interp::{run_with_port, RunError};
use super::machine::Machine;
use super::oracle::{EnumerationRefused, OracleError};
use crate::strings::BitString;

/// Largest `n` accepted by [`brute_force_step_count`].
pub const BRUTE_FORCE_CAP: usize = 4;
/// Upper limit on explored runs.
pub const BRUTE_FORCE_RUN_LIMIT: usize = 5_000_000;

#[derive(Debug, Error)]
pub enum BruteForceError {
    #[error(transparent)]
    Refused(#[from] EnumerationRefused),
    #[error("run on input {input} failed: {source}")]
    Run { input: BitString, source: RunError },
    #[error("exploration exceeded {0} runs")]
    TooManyRuns(usize),
}

struct Search<'a> {
    machine: &'a Machine,
    answers: Vec<BitString>,
    fuel: u64,
    runs: usize,
}

impl Search<'_> {
    fn explore(
        &mut self,
        input: &BitString,
        table: &mut BTreeMap<BitString, BitString>,
    ) -> Result<u64, BruteForceError> {
        self.runs += 1;
        if self.runs > BRUTE_FORCE_RUN_LIMIT {
            return Err(BruteForceError::TooManyRuns(BRUTE_FORCE_RUN_LIMIT));
        }
        let mut missing = None;
        let mut port = |q: &BitString| match table.get(q) {
            Some(a) => Ok(a.clone()),
            None => {
                missing = Some(q.clone());
                Err(OracleError::Other("unresolved".into()))
            }
        };
        let result = run_with_port(self.machine, &mut port, input, self.fuel);
        match (result, missing) {
            (Ok(t), _) => Ok(t.steps),
            (Err(RunError::Oracle { .. }), Some(q)) => {
                let mut best = 0;
                for i in 0..self.answers.len() {
                    table.insert(q.clone(), self.answers[i].clone());
                    best = best.max(self.explore(input, table)?);
                }
                table.remove(&q);
                Ok(best)
            }
            (Err(source), _) => Err(BruteForceError::Run { input: input.clone(), source }),
        }
    }
}

/// `t(n) = max` of the running time over `|a| ≤ n` and all oracles whose
/// answers have length `≤ n`.
pub fn brute_force_step_count(machine: &Machine, n: usize, fuel: u64) -> Result<u64, BruteForceError> {
    if n > BRUTE_FORCE_CAP {
        return Err(EnumerationRefused { n, cap: BRUTE_FORCE_CAP }.into());
    }
    let mut search = Search { machine, answers: BitString::all_up_to(n).collect(), fuel, runs: 0 };
    let mut best = 0;
    for input in BitString::all_up_to(n) {
        best = best.max(search.explore(&input, &mut BTreeMap::new())?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::otm::parse::parse_machine_text;

    #[test]
    fn toy_machines() {
        let halt = parse_machine_text("HALT r0").unwrap();
        let query = parse_machine_text("QUERY r0 r1\nHALT r1").unwrap();
        let copy = parse_machine_text("QUERY r0 r1\nCOPY r1 r2\nHALT r2").unwrap();
        for n in 0..=3 {
            assert_eq!(brute_force_step_count(&halt, n, 100).unwrap(), 1);
            assert_eq!(brute_force_step_count(&query, n, 100).unwrap(), 2);
            assert_eq!(brute_force_step_count(&copy, n, 100).unwrap(), n as u64 + 3);
        }
    }

    #[test]
    fn guards() {
        let halt = parse_machine_text("HALT r0").unwrap();
        assert!(matches!(brute_force_step_count(&halt, 9, 100), Err(BruteForceError::Refused(_))));
        let spin = parse_machine_text("l: JMP l").unwrap();
        assert!(matches!(
            brute_force_step_count(&spin, 1, 50),
            Err(BruteForceError::Run { source: RunError::FuelExhausted { .. }, .. })
        ));
    }
}
