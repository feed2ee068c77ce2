use num_traits::{One, Zero};
use serde::Serialize;

use super::VerifyError;
use crate::exact::{as_string, pow, to_f64, Rational};
use crate::model::DependencyGraph;
use crate::shearer::{truncated_log_partials, QCalculator};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedSumReport {
    pub max_len: usize,
    /// Partial sums for `L = 0..=max_len`, as floats.
    pub partials: Vec<f64>,
    #[serde(with = "as_string")]
    pub final_partial: Rational,
    #[serde(with = "as_string")]
    pub q_empty: Rational,
    #[serde(with = "as_string")]
    pub target: Rational,
    /// `target − final_partial`.
    #[serde(with = "as_string")]
    pub gap: Rational,
    /// `(1 − q_∅)^L / q_∅`.
    #[serde(with = "as_string")]
    pub tail_bound: Rational,
    pub gap_f64: f64,
    pub tail_bound_f64: f64,
    pub monotone: bool,
    pub bounded_above: bool,
    pub within_tail_bound: bool,
    pub pass: bool,
}

/// Checks that the sums over independent set sequences of length at most
/// `L` increase with `L`, never exceed `1/q_∅`, and at `L = max_len` are
/// within `(1 − q_∅)^L / q_∅` of it.
pub fn truncated_sum_convergence_test(
    graph: &DependencyGraph,
    p: &[Rational],
    max_len: usize,
) -> Result<TruncatedSumReport, VerifyError> {
    let partials = truncated_log_partials(graph, p, max_len)?;
    let q_empty = QCalculator::new(graph, p)?.q_empty();
    if q_empty <= Rational::zero() {
        // outside Shearer's region the series diverges; report it as failing
        let last = partials.last().cloned().expect("non-empty");
        return Ok(TruncatedSumReport {
            max_len,
            partials: partials.iter().map(to_f64).collect(),
            final_partial: last,
            q_empty,
            target: Rational::zero(),
            gap: Rational::zero(),
            tail_bound: Rational::zero(),
            gap_f64: f64::INFINITY,
            tail_bound_f64: 0.0,
            monotone: partials.windows(2).all(|w| w[0] <= w[1]),
            bounded_above: false,
            within_tail_bound: false,
            pass: false,
        });
    }
    let target = q_empty.recip();
    let monotone = partials.windows(2).all(|w| w[0] <= w[1]);
    let bounded_above = partials.iter().all(|s| s <= &target);
    let final_partial = partials.last().cloned().expect("non-empty");
    let gap = &target - &final_partial;
    let tail_bound = pow(&(Rational::one() - &q_empty), max_len) / &q_empty;
    let within_tail_bound = gap <= tail_bound;
    Ok(TruncatedSumReport {
        max_len,
        partials: partials.iter().map(to_f64).collect(),
        gap_f64: to_f64(&gap),
        tail_bound_f64: to_f64(&tail_bound),
        final_partial,
        q_empty,
        target,
        gap,
        tail_bound,
        pass: monotone && bounded_above && within_tail_bound,
        monotone,
        bounded_above,
        within_tail_bound,
    })
}
