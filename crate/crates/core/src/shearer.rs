//! Exact analysis over the dependency graph: `q_I` values, exact expected
//! resampling counts, and the sufficient conditions for efficiency.
//!
//! `q_∅` is evaluated with the deletion recurrence
//! `q_∅(G) = q_∅(G − v) − p_v · q_∅(G − Γ⁺(v))`, memoised on vertex masks,
//! and `q_I = p_I · q_∅(G − Γ⁺(I))`. Both follow from the alternating sum
//! over independent supersets; the tests check them against that sum.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{as_string, e_bounds, int, to_f64, Rational};
use crate::model::{DependencyGraph, Instance};

/// Hard guard on the number of events for exact analysis.
pub const MAX_EVENTS: usize = 30;

/// Budget on the number of independent sets enumerated explicitly.
pub const SET_BUDGET: usize = 1 << 22;

/// Budget on independent sets for the sequence-sum dynamic program.
pub const SEQUENCE_SET_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShearerError {
    #[error("exact analysis supports at most {max} events, instance has {m}")]
    TooManyEvents { m: usize, max: usize },
    #[error("probability vector has {found} entries for {m} events")]
    LengthMismatch { m: usize, found: usize },
    #[error("Shearer condition fails: q_empty = {q_empty} is not positive")]
    ConditionFails { q_empty: String },
    #[error("more than {budget} independent sets to enumerate")]
    TooManySets { budget: usize },
    #[error("p_c(d) needs d >= 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("no slack: p = {p} is not below p_c = {p_c}")]
    NoSlack { p: String, p_c: String },
}

/// `q_I` together with whether `I` is independent (`q_I = 0` otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QValue {
    pub value: Rational,
    pub independent: bool,
}

/// Memoised evaluator of `q` values for one graph and probability vector.
pub struct QCalculator<'g> {
    graph: &'g DependencyGraph,
    p: Vec<Rational>,
    closed: Vec<u32>,
    memo: HashMap<u32, Rational>,
}

impl<'g> QCalculator<'g> {
    pub fn new(graph: &'g DependencyGraph, p: &[Rational]) -> Result<Self, ShearerError> {
        let m = graph.len();
        if m > MAX_EVENTS {
            return Err(ShearerError::TooManyEvents { m, max: MAX_EVENTS });
        }
        if p.len() != m {
            return Err(ShearerError::LengthMismatch { m, found: p.len() });
        }
        let closed = (0..m)
            .map(|i| {
                graph
                    .neighbors(i)
                    .iter()
                    .fold(1u32 << i, |acc, &j| acc | 1 << j)
            })
            .collect();
        Ok(QCalculator {
            graph,
            p: p.to_vec(),
            closed,
            memo: HashMap::new(),
        })
    }

    pub fn full_mask(&self) -> u32 {
        if self.p.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.p.len()) - 1
        }
    }

    /// `q_∅` of the subgraph induced by `mask`.
    pub fn q_empty_of(&mut self, mask: u32) -> Rational {
        if mask == 0 {
            return Rational::one();
        }
        if let Some(v) = self.memo.get(&mask) {
            return v.clone();
        }
        let v = mask.trailing_zeros() as usize;
        let without = self.q_empty_of(mask & !(1 << v));
        let rest = self.q_empty_of(mask & !self.closed[v]);
        let value = without - &self.p[v] * rest;
        self.memo.insert(mask, value.clone());
        value
    }

    pub fn q_empty(&mut self) -> Rational {
        self.q_empty_of(self.full_mask())
    }

    pub fn q(&mut self, set: &[usize]) -> QValue {
        if !self.graph.is_independent(set) {
            return QValue {
                value: Rational::zero(),
                independent: false,
            };
        }
        let mut p_set = Rational::one();
        let mut blocked = 0u32;
        for &i in set {
            p_set *= &self.p[i];
            blocked |= self.closed[i];
        }
        let value = p_set * self.q_empty_of(self.full_mask() & !blocked);
        QValue {
            value,
            independent: true,
        }
    }

    /// Every independent set as a bit mask, including the empty set.
    pub fn independent_sets(&self, budget: usize) -> Result<Vec<u32>, ShearerError> {
        let mut out = Vec::new();
        self.collect_sets(0, 0, 0, budget, &mut out)?;
        Ok(out)
    }

    fn collect_sets(
        &self,
        start: usize,
        current: u32,
        blocked: u32,
        budget: usize,
        out: &mut Vec<u32>,
    ) -> Result<(), ShearerError> {
        if out.len() >= budget {
            return Err(ShearerError::TooManySets { budget });
        }
        out.push(current);
        for v in start..self.p.len() {
            if blocked & (1 << v) == 0 {
                self.collect_sets(
                    v + 1,
                    current | 1 << v,
                    blocked | self.closed[v],
                    budget,
                    out,
                )?;
            }
        }
        Ok(())
    }

    pub fn closed_mask(&self, set: u32) -> u32 {
        mask_members(set).fold(set, |acc, i| acc | self.closed[i])
    }

    pub fn p_of(&self, set: u32) -> Rational {
        mask_members(set).fold(Rational::one(), |acc, i| acc * &self.p[i])
    }
}

pub fn mask_members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&i| mask & (1 << i) != 0)
}

pub fn mask_to_vec(mask: u32) -> Vec<usize> {
    mask_members(mask).collect()
}

/// `q_I(p)`; a dependent `I` yields zero with `independent = false`.
pub fn q_value(
    graph: &DependencyGraph,
    p: &[Rational],
    set: &[usize],
) -> Result<QValue, ShearerError> {
    Ok(QCalculator::new(graph, p)?.q(set))
}

/// `q_I` for every independent set `I` (as sorted id lists), in DFS order.
/// The values sum to exactly 1.
pub fn all_q_values(
    graph: &DependencyGraph,
    p: &[Rational],
) -> Result<Vec<(Vec<usize>, Rational)>, ShearerError> {
    let mut calc = QCalculator::new(graph, p)?;
    let sets = calc.independent_sets(SET_BUDGET)?;
    let mut out = Vec::with_capacity(sets.len());
    let mut total = Rational::zero();
    for mask in sets {
        let members = mask_to_vec(mask);
        let q = calc.q(&members).value;
        total += &q;
        out.push((members, q));
    }
    assert!(total.is_one(), "q values must sum to 1, got {total}");
    Ok(out)
}

/// Exact `E[T] = Σ q_i / q_∅` for partial rejection sampling on an
/// extremal instance.
pub fn expected_resamples(
    graph: &DependencyGraph,
    p: &[Rational],
) -> Result<Rational, ShearerError> {
    Ok(per_event_expectations(graph, p)?.iter().sum())
}

/// `E[T_i] = q_i / q_∅` for every event.
pub fn per_event_expectations(
    graph: &DependencyGraph,
    p: &[Rational],
) -> Result<Vec<Rational>, ShearerError> {
    let mut calc = QCalculator::new(graph, p)?;
    let q_empty = calc.q_empty();
    if !q_empty.is_positive() {
        return Err(ShearerError::ConditionFails {
            q_empty: q_empty.to_string(),
        });
    }
    Ok((0..graph.len())
        .map(|i| calc.q(&[i]).value / &q_empty)
        .collect())
}

/// Asymmetric local lemma: `p_i ≤ x_i Π_{j~i} (1 − x_j)` for all `i`.
pub fn check_asymmetric_lll(graph: &DependencyGraph, p: &[Rational], x: &[Rational]) -> bool {
    assert_eq!(p.len(), graph.len());
    assert_eq!(x.len(), graph.len());
    (0..graph.len()).all(|i| {
        let rhs = graph
            .neighbors(i)
            .iter()
            .fold(x[i].clone(), |acc, &j| acc * (Rational::one() - &x[j]));
        p[i] <= rhs
    })
}

/// `p_c(d) = (d−1)^(d−1) / d^d`.
pub fn symmetric_pc(d: usize) -> Result<Rational, ShearerError> {
    if d < 2 {
        return Err(ShearerError::DegreeTooSmall(d));
    }
    let num = num_traits::pow(int(d as i64 - 1), d - 1);
    let den = num_traits::pow(int(d as i64), d);
    Ok(num / den)
}

/// `p / (p_c − p)`, the per-event coefficient of the linear bound.
pub fn linear_coefficient(d: usize, p: &Rational) -> Result<Rational, ShearerError> {
    let p_c = symmetric_pc(d)?;
    if *p >= p_c {
        return Err(ShearerError::NoSlack {
            p: p.to_string(),
            p_c: p_c.to_string(),
        });
    }
    Ok(p / (p_c - p))
}

/// `E[T] ≤ m · p / (p_c − p)` for maximum degree `d` and `p < p_c(d)`.
pub fn linear_bound(m: usize, d: usize, p: &Rational) -> Result<Rational, ShearerError> {
    Ok(linear_coefficient(d, p)? * int(m as i64))
}

/// Constants of the two efficiency conditions `c1·e·p·Δ² ≤ 1` and
/// `c2·e·r·Δ ≤ 1` for general PRS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GprsConstants {
    pub c1: u32,
    pub c2: u32,
}

impl Default for GprsConstants {
    fn default() -> Self {
        GprsConstants { c1: 6, c2: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GprsVerdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GprsReport {
    pub delta: usize,
    #[serde(with = "as_string")]
    pub p: Rational,
    #[serde(with = "as_string")]
    pub r: Rational,
    pub constants: GprsConstants,
    /// `c1·e·p·Δ²` (floating point, for display).
    pub p_product: f64,
    /// `c2·e·r·Δ` (floating point, for display).
    pub r_product: f64,
    pub p_condition: bool,
    pub r_condition: bool,
    pub verdict: GprsVerdict,
}

/// Evaluates the general-PRS efficiency conditions with `p = max p_i` and
/// `r = max r_ij`. Verdicts use the upper bound on `e`, so `Pass` is
/// certified.
pub fn check_gprs_conditions(instance: &Instance) -> GprsReport {
    check_gprs_conditions_with(instance, GprsConstants::default())
}

pub fn check_gprs_conditions_with(instance: &Instance, constants: GprsConstants) -> GprsReport {
    let delta = instance.dependency_graph().max_degree();
    let p = instance
        .probabilities()
        .into_iter()
        .max()
        .unwrap_or_else(Rational::zero);
    let r = instance.r_matrix().max;
    gprs_verdict(delta, p, r, constants)
}

pub fn gprs_verdict(
    delta: usize,
    p: Rational,
    r: Rational,
    constants: GprsConstants,
) -> GprsReport {
    let (_, e_hi) = e_bounds();
    let d = int(delta as i64);
    let p_upper = int(constants.c1.into()) * &e_hi * &p * &d * &d;
    let r_upper = int(constants.c2.into()) * &e_hi * &r * &d;
    let e = std::f64::consts::E;
    let p_product = f64::from(constants.c1) * e * to_f64(&p) * (delta * delta) as f64;
    let r_product = f64::from(constants.c2) * e * to_f64(&r) * delta as f64;
    let p_condition = p_upper <= Rational::one();
    let r_condition = r_upper <= Rational::one();
    let verdict = if delta < 2 {
        GprsVerdict::NotApplicable
    } else if p_condition && r_condition {
        GprsVerdict::Pass
    } else {
        GprsVerdict::Fail
    };
    GprsReport {
        delta,
        p,
        r,
        constants,
        p_product,
        r_product,
        p_condition,
        r_condition,
        verdict,
    }
}

/// Partial sums `Σ_{|S| ≤ L} p_S` over independent set sequences for
/// `L = 0..=max_len`. Entry 0 is 1 (the empty sequence).
pub fn truncated_log_partials(
    graph: &DependencyGraph,
    p: &[Rational],
    max_len: usize,
) -> Result<Vec<Rational>, ShearerError> {
    let calc = QCalculator::new(graph, p)?;
    let sets: Vec<u32> = calc
        .independent_sets(SEQUENCE_SET_BUDGET + 1)
        .map_err(|_| ShearerError::TooManySets {
            budget: SEQUENCE_SET_BUDGET,
        })?
        .into_iter()
        .filter(|&s| s != 0)
        .collect();
    let weights: Vec<Rational> = sets.iter().map(|&s| calc.p_of(s)).collect();
    let closed: Vec<u32> = sets.iter().map(|&s| calc.closed_mask(s)).collect();
    // successors[a] = sets allowed right after sets[a].
    let successors: Vec<Vec<usize>> = (0..sets.len())
        .map(|a| {
            (0..sets.len())
                .filter(|&b| sets[b] & !closed[a] == 0)
                .collect()
        })
        .collect();
    let mut partials = vec![Rational::one()];
    let mut current = weights.clone();
    for len in 1..=max_len {
        let level: Rational = current.iter().sum();
        let next_total = partials[len - 1].clone() + level;
        partials.push(next_total);
        if len == max_len {
            break;
        }
        let mut next = vec![Rational::zero(); sets.len()];
        for (a, g) in current.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            for &b in &successors[a] {
                next[b] += g;
            }
        }
        for (b, slot) in next.iter_mut().enumerate() {
            *slot *= &weights[b];
        }
        current = next;
    }
    Ok(partials)
}

/// `Σ p_S` over independent set sequences of length at most `max_len`.
pub fn truncated_log_sum(
    graph: &DependencyGraph,
    p: &[Rational],
    max_len: usize,
) -> Result<Rational, ShearerError> {
    Ok(truncated_log_partials(graph, p, max_len)?
        .pop()
        .expect("non-empty"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricConstants {
    #[serde(with = "as_string")]
    pub p: Rational,
    pub delta: usize,
    #[serde(serialize_with = "as_string::option::serialize")]
    pub p_c: Option<Rational>,
    /// `m·p/(p_c − p)` when `p < p_c`.
    #[serde(serialize_with = "as_string::option::serialize")]
    pub linear_bound: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShearerReport {
    pub events: usize,
    #[serde(with = "as_string")]
    pub q_empty: Rational,
    #[serde(serialize_with = "as_string::vec::serialize")]
    pub q_singletons: Vec<Rational>,
    #[serde(serialize_with = "as_string::option::serialize")]
    pub expected_t: Option<Rational>,
    #[serde(serialize_with = "as_string::vec::serialize")]
    pub per_event_expected: Vec<Rational>,
    pub independent_sets: usize,
    pub shearer_ok: bool,
    pub lll_ok: bool,
    pub symmetric_constants: SymmetricConstants,
    pub gprs: GprsReport,
}

/// Full exact analysis of an instance with at most [`MAX_EVENTS`] events.
pub fn shearer_report(instance: &Instance) -> Result<ShearerReport, ShearerError> {
    let graph = instance.dependency_graph();
    let p = instance.probabilities();
    let mut calc = QCalculator::new(graph, &p)?;
    let q_empty = calc.q_empty();
    let q_singletons: Vec<Rational> = (0..p.len()).map(|i| calc.q(&[i]).value).collect();
    let all = all_q_values(graph, &p)?;
    let shearer_ok = q_empty.is_positive() && all.iter().all(|(_, q)| !q.is_negative());
    let (expected_t, per_event_expected) = if q_empty.is_positive() {
        let per: Vec<Rational> = q_singletons.iter().map(|q| q / &q_empty).collect();
        (Some(per.iter().sum()), per)
    } else {
        (None, Vec::new())
    };
    let delta = graph.max_degree();
    let lll_ok = if delta == 0 {
        p.iter().all(|pi| *pi < Rational::one())
    } else {
        let x = vec![Rational::new(1.into(), (delta as i64 + 1).into()); p.len()];
        check_asymmetric_lll(graph, &p, &x)
    };
    let p_max = p.iter().max().cloned().unwrap_or_else(Rational::zero);
    let p_c = symmetric_pc(delta).ok();
    let linear = p_c
        .as_ref()
        .and_then(|_| linear_bound(p.len(), delta, &p_max).ok());
    Ok(ShearerReport {
        events: p.len(),
        q_empty,
        q_singletons,
        expected_t,
        per_event_expected,
        independent_sets: all.len(),
        shearer_ok,
        lll_ok,
        symmetric_constants: SymmetricConstants {
            p: p_max,
            delta,
            p_c,
            linear_bound: linear,
        },
        gprs: check_gprs_conditions(instance),
    })
}
