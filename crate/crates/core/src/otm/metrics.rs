use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::interp::Trace;
use crate::sopoly::UnaryPolynomial;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub steps: u64,
    /// max of the input length and every answer length
    pub m: usize,
    /// Breakpoints `(step, m_k)` of the running maximum; starts at `(0, |a|)`.
    pub m_series: Vec<(u64, usize)>,
    pub lookahead_revisions: usize,
    pub length_revisions: usize,
}

impl RunMetrics {
    /// `m_k`: running maximum after `k` steps.
    pub fn m_at(&self, k: u64) -> usize {
        self.m_series.iter().take_while(|(s, _)| *s <= k).last().map(|(_, m)| *m).unwrap_or(0)
    }
}

pub fn metrics(t: &Trace) -> RunMetrics {
    let mut m = t.input_length;
    let mut m_series = vec![(0, m)];
    let mut max_query: Option<usize> = None;
    let mut max_answer: Option<usize> = None;
    let mut lookahead = 0;
    let mut length = 0;
    for e in &t.events {
        let q = e.query.len();
        if max_query.is_none_or(|mq| q > mq) {
            lookahead += 1;
            max_query = Some(q);
        }
        let a = e.answer.len();
        if a > t.input_length && max_answer.is_none_or(|ma| a > ma) {
            length += 1;
        }
        max_answer = Some(max_answer.map_or(a, |ma| ma.max(a)));
        if a > m {
            m = a;
            m_series.push((e.step, m));
        }
    }
    RunMetrics { steps: t.steps, m, m_series, lookahead_revisions: lookahead, length_revisions: length }
}

/// `steps ≤ p(m)`.
pub fn check_step_count_plain(t: &Trace, p: &UnaryPolynomial) -> bool {
    BigUint::from(t.steps) <= p.eval(&BigUint::from(metrics(t).m))
}

/// `k ≤ p(m_k)` for every `1 ≤ k ≤ steps`.
pub fn check_step_count_ks(t: &Trace, p: &UnaryPolynomial) -> bool {
    let series = metrics(t).m_series;
    series.iter().enumerate().all(|(i, &(start, m))| {
        // Largest k governed by this breakpoint.
        let end = series.get(i + 1).map_or(t.steps, |&(s, _)| s.saturating_sub(1));
        end < start.max(1) || BigUint::from(end) <= p.eval(&BigUint::from(m))
    })
}
