//! Variable-framework instances: variables with weighted finite domains,
//! bad events with explicit violating sets, and the dependency graph.
//!
//! Variable and event ids are dense and 0-based; every canonical order in
//! the crate is ascending id.

mod json;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use thiserror::Error;

use crate::exact::Rational;
use crate::rng::Categorical;

pub use json::{instance_from_json, instance_to_json, InstanceFile};

/// Default bound on `|vbl(A)|` for a single event.
pub const DEFAULT_EVENT_VAR_CAP: usize = 24;

/// Budget on violating-tuple pairs examined for one dependent pair in
/// [`Instance::is_extremal`].
pub const PAIR_CHECK_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{kind} ids must be dense and ascending: expected {expected}, found {found}")]
    NonDenseId {
        kind: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("variable {var}: domain must be non-empty")]
    EmptyDomain { var: usize },
    #[error("variable {var}: expected {expected} weights, found {found}")]
    WeightCount {
        var: usize,
        expected: usize,
        found: usize,
    },
    #[error("variable {var}: weights must be non-negative")]
    NegativeWeight { var: usize },
    #[error("variable {var}: weights sum to {sum}, not 1")]
    WeightSum { var: usize, sum: String },
    #[error("event {event}: unknown variable {var}")]
    UnknownVariable { event: usize, var: usize },
    #[error("event {event}: variable {var} listed twice")]
    DuplicateVariable { event: usize, var: usize },
    #[error("event {event}: violating tuple has length {found}, expected {expected}")]
    TupleArity {
        event: usize,
        expected: usize,
        found: usize,
    },
    #[error("event {event}: value {value} out of range for variable {var}")]
    ValueOutOfRange {
        event: usize,
        var: usize,
        value: u32,
    },
    #[error("event {event}: duplicate violating tuple")]
    DuplicateTuple { event: usize },
    #[error("event {event} depends on {len} variables, cap is {cap}")]
    TooManyEventVariables {
        event: usize,
        len: usize,
        cap: usize,
    },
    #[error("assignment has no value for variable {var}")]
    MissingValue { var: usize },
    #[error("assignment value {value} out of range for variable {var}")]
    AssignmentOutOfRange { var: usize, value: u32 },
    #[error("events {first} and {second} are too large to certify ({work} tuple pairs, budget {budget})")]
    TooLargeToCertify {
        first: usize,
        second: usize,
        work: u64,
        budget: u64,
    },
    #[error("unknown event id {0}")]
    UnknownEvent(usize),
    #[error("malformed instance: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableSpec {
    pub id: usize,
    pub domain_size: u32,
    /// Marginal of the product distribution; sums to exactly 1.
    pub weights: Vec<Rational>,
}

impl VariableSpec {
    pub fn new(id: usize, weights: Vec<Rational>) -> Self {
        VariableSpec {
            id,
            domain_size: weights.len() as u32,
            weights,
        }
    }

    pub fn uniform(id: usize, domain_size: u32) -> Self {
        let w = Rational::new(1.into(), i64::from(domain_size).into());
        VariableSpec::new(id, vec![w; domain_size as usize])
    }

    pub fn binary(id: usize, p_one: Rational) -> Self {
        VariableSpec::new(id, vec![Rational::one() - &p_one, p_one])
    }

    fn validate(&self) -> Result<(), ModelError> {
        let var = self.id;
        if self.domain_size == 0 {
            return Err(ModelError::EmptyDomain { var });
        }
        if self.weights.len() != self.domain_size as usize {
            return Err(ModelError::WeightCount {
                var,
                expected: self.domain_size as usize,
                found: self.weights.len(),
            });
        }
        if self.weights.iter().any(|w| w.is_negative()) {
            return Err(ModelError::NegativeWeight { var });
        }
        let sum: Rational = self.weights.iter().sum();
        if !sum.is_one() {
            return Err(ModelError::WeightSum {
                var,
                sum: sum.to_string(),
            });
        }
        Ok(())
    }
}

/// A bad event: the set of violating tuples over `vbl`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSpec {
    pub id: usize,
    vbl: Vec<usize>,
    /// Sorted lexicographically, no duplicates; each tuple is aligned with `vbl`.
    violating: Vec<Vec<u32>>,
}

impl EventSpec {
    pub fn new(
        id: usize,
        vbl: Vec<usize>,
        mut violating: Vec<Vec<u32>>,
    ) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for &v in &vbl {
            if !seen.insert(v) {
                return Err(ModelError::DuplicateVariable { event: id, var: v });
            }
        }
        for t in &violating {
            if t.len() != vbl.len() {
                return Err(ModelError::TupleArity {
                    event: id,
                    expected: vbl.len(),
                    found: t.len(),
                });
            }
        }
        violating.sort_unstable();
        if violating.windows(2).any(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateTuple { event: id });
        }
        Ok(EventSpec { id, vbl, violating })
    }

    /// The event "every listed variable takes the listed value": one
    /// violating tuple. Variables are stored in ascending order.
    pub fn single(id: usize, pattern: &[(usize, u32)]) -> Result<Self, ModelError> {
        let mut pattern = pattern.to_vec();
        pattern.sort_unstable();
        let vbl = pattern.iter().map(|&(v, _)| v).collect();
        let tuple = pattern.iter().map(|&(_, x)| x).collect();
        EventSpec::new(id, vbl, vec![tuple])
    }

    /// Unsatisfying assignments of a clause over binary variables, where
    /// value 1 means true. Literals are `(variable, positive)`.
    pub fn clause(id: usize, literals: &[(usize, bool)]) -> Result<Self, ModelError> {
        let pattern: Vec<(usize, u32)> = literals
            .iter()
            .map(|&(v, positive)| (v, if positive { 0 } else { 1 }))
            .collect();
        EventSpec::single(id, &pattern)
    }

    pub fn vbl(&self) -> &[usize] {
        &self.vbl
    }

    pub fn violating(&self) -> &[Vec<u32>] {
        &self.violating
    }

    fn cmp_tuple(&self, tuple: &[u32], values: &[u32]) -> Ordering {
        tuple
            .iter()
            .zip(&self.vbl)
            .map(|(&t, &v)| t.cmp(&values[v]))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }

    /// Occurrence under a total assignment given as a dense value slice.
    pub fn occurs_in(&self, values: &[u32]) -> bool {
        self.violating
            .binary_search_by(|t| self.cmp_tuple(t, values))
            .is_ok()
    }

    /// `σ ∈ A` for an assignment that is total on `vbl`.
    pub fn occurs(&self, assignment: &Assignment) -> Result<bool, ModelError> {
        let mut tuple = Vec::with_capacity(self.vbl.len());
        for &v in &self.vbl {
            tuple.push(
                assignment
                    .get(v)
                    .ok_or(ModelError::MissingValue { var: v })?,
            );
        }
        Ok(self.violating.binary_search(&tuple).is_ok())
    }

    /// Whether some violating tuple agrees with `lookup` on every variable
    /// it assigns.
    pub fn compatible_with(&self, lookup: impl Fn(usize) -> Option<u32>) -> bool {
        let fixed: Vec<(usize, u32)> = self
            .vbl
            .iter()
            .enumerate()
            .filter_map(|(pos, &v)| lookup(v).map(|x| (pos, x)))
            .collect();
        self.violating
            .iter()
            .any(|t| fixed.iter().all(|&(pos, x)| t[pos] == x))
    }

    /// `A ∩ σ_S ≠ ∅` for a partial assignment. Unassigned variables are free.
    pub fn compatible(&self, partial: &Assignment) -> bool {
        self.compatible_with(|v| partial.get(v))
    }
}

/// A total or partial map from variable ids to domain-value indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    values: Vec<Option<u32>>,
}

impl Assignment {
    pub fn empty(num_vars: usize) -> Self {
        Assignment {
            values: vec![None; num_vars],
        }
    }

    pub fn total(values: Vec<u32>) -> Self {
        Assignment {
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn from_pairs(num_vars: usize, pairs: &[(usize, u32)]) -> Self {
        let mut a = Assignment::empty(num_vars);
        for &(v, x) in pairs {
            a.set(v, x);
        }
        a
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(Option::is_none)
    }

    pub fn get(&self, var: usize) -> Option<u32> {
        self.values.get(var).copied().flatten()
    }

    pub fn set(&mut self, var: usize, value: u32) {
        if var >= self.values.len() {
            self.values.resize(var + 1, None);
        }
        self.values[var] = Some(value);
    }

    pub fn unset(&mut self, var: usize) {
        if let Some(slot) = self.values.get_mut(var) {
            *slot = None;
        }
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// Dense values if the assignment is total.
    pub fn to_values(&self) -> Option<Vec<u32>> {
        self.values.iter().copied().collect()
    }

    /// Restriction to `vars`; all other variables become unassigned.
    pub fn restrict(&self, vars: impl IntoIterator<Item = usize>) -> Assignment {
        let mut out = Assignment::empty(self.values.len());
        for v in vars {
            if let Some(x) = self.get(v) {
                out.set(v, x);
            }
        }
        out
    }

    pub fn assigned(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(v, x)| x.map(|x| (v, x)))
    }
}

/// Event adjacency: `i ~ j` iff `vbl(A_i) ∩ vbl(A_j) ≠ ∅` and `i ≠ j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    adjacency: Vec<Vec<usize>>,
    max_degree: usize,
}

impl DependencyGraph {
    /// Builds a graph on `m` vertices from undirected edges. Loops and
    /// repeated edges are dropped.
    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Self {
        let mut sets = vec![BTreeSet::new(); m];
        for &(a, b) in edges {
            assert!(a < m && b < m, "edge ({a},{b}) out of range for m={m}");
            if a != b {
                sets[a].insert(b);
                sets[b].insert(a);
            }
        }
        Self::from_sets(sets)
    }

    fn from_sets(sets: Vec<BTreeSet<usize>>) -> Self {
        let adjacency: Vec<Vec<usize>> =
            sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        DependencyGraph {
            adjacency,
            max_degree,
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(a, &i)| set[a + 1..].iter().all(|&j| i != j && !self.adjacent(i, j)))
    }

    /// `Γ⁺(S)`, sorted.
    pub fn closed_neighborhood(&self, set: &[usize]) -> Vec<usize> {
        let mut out: BTreeSet<usize> = set.iter().copied().collect();
        for &i in set {
            out.extend(self.adjacency[i].iter().copied());
        }
        out.into_iter().collect()
    }
}

/// `r_ij` for every ordered dependent pair, and their maximum `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    pub entries: BTreeMap<(usize, usize), Rational>,
    pub max: Rational,
}

/// Variables, bad events, and cached derived structure.
#[derive(Debug, Clone)]
pub struct Instance {
    variables: Vec<VariableSpec>,
    events: Vec<EventSpec>,
    samplers: Vec<Categorical>,
    var_events: Vec<Vec<usize>>,
    graph: OnceLock<DependencyGraph>,
    extremal: OnceLock<Result<bool, ModelError>>,
}

impl Instance {
    pub fn new(variables: Vec<VariableSpec>, events: Vec<EventSpec>) -> Result<Self, ModelError> {
        Self::with_cap(variables, events, DEFAULT_EVENT_VAR_CAP)
    }

    pub fn with_cap(
        variables: Vec<VariableSpec>,
        events: Vec<EventSpec>,
        event_var_cap: usize,
    ) -> Result<Self, ModelError> {
        for (i, var) in variables.iter().enumerate() {
            if var.id != i {
                return Err(ModelError::NonDenseId {
                    kind: "variable",
                    expected: i,
                    found: var.id,
                });
            }
            var.validate()?;
        }
        let mut var_events = vec![Vec::new(); variables.len()];
        for (i, ev) in events.iter().enumerate() {
            if ev.id != i {
                return Err(ModelError::NonDenseId {
                    kind: "event",
                    expected: i,
                    found: ev.id,
                });
            }
            if ev.vbl.len() > event_var_cap {
                return Err(ModelError::TooManyEventVariables {
                    event: i,
                    len: ev.vbl.len(),
                    cap: event_var_cap,
                });
            }
            for &v in &ev.vbl {
                if v >= variables.len() {
                    return Err(ModelError::UnknownVariable { event: i, var: v });
                }
                var_events[v].push(i);
            }
            for t in &ev.violating {
                for (&x, &v) in t.iter().zip(&ev.vbl) {
                    if x >= variables[v].domain_size {
                        return Err(ModelError::ValueOutOfRange {
                            event: i,
                            var: v,
                            value: x,
                        });
                    }
                }
            }
        }
        let samplers = variables
            .iter()
            .map(|v| Categorical::from_weights(&v.weights))
            .collect();
        Ok(Instance {
            variables,
            events,
            samplers,
            var_events,
            graph: OnceLock::new(),
            extremal: OnceLock::new(),
        })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn events(&self) -> &[EventSpec] {
        &self.events
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn event(&self, id: usize) -> Result<&EventSpec, ModelError> {
        self.events.get(id).ok_or(ModelError::UnknownEvent(id))
    }

    /// Events whose `vbl` contains `var`, ascending.
    pub fn events_of_var(&self, var: usize) -> &[usize] {
        &self.var_events[var]
    }

    pub(crate) fn sampler_of(&self, var: usize) -> &Categorical {
        &self.samplers[var]
    }

    pub fn dependency_graph(&self) -> &DependencyGraph {
        self.graph.get_or_init(|| build_dependency_graph(self))
    }

    /// Whether every pair of dependent events is disjoint. The result is
    /// cached.
    pub fn is_extremal(&self) -> Result<bool, ModelError> {
        self.extremal.get_or_init(|| compute_extremal(self)).clone()
    }

    /// `Pr(A_i)` under the product measure.
    pub fn event_probability(&self, id: usize) -> Result<Rational, ModelError> {
        let ev = self.event(id)?;
        Ok(ev
            .violating
            .iter()
            .map(|t| self.tuple_weight(&ev.vbl, t))
            .sum())
    }

    pub fn probabilities(&self) -> Vec<Rational> {
        (0..self.events.len())
            .map(|i| self.event_probability(i).expect("valid id"))
            .collect()
    }

    fn tuple_weight(&self, vars: &[usize], tuple: &[u32]) -> Rational {
        vars.iter()
            .zip(tuple)
            .map(|(&v, &x)| &self.variables[v].weights[x as usize])
            .fold(Rational::one(), |acc, w| acc * w)
    }

    /// `r_ij = μ(shared-variable pattern of A_i ∩ A_j extends to A_j)` for
    /// every ordered dependent pair.
    pub fn r_matrix(&self) -> RMatrix {
        let graph = self.dependency_graph();
        let mut entries = BTreeMap::new();
        let mut max = Rational::zero();
        for i in 0..self.events.len() {
            for &j in graph.neighbors(i) {
                let ej = &self.events[j];
                let shared: Vec<usize> = self.events[i]
                    .vbl
                    .iter()
                    .copied()
                    .filter(|v| ej.vbl.contains(v))
                    .collect();
                let positions: Vec<usize> = shared
                    .iter()
                    .map(|v| ej.vbl.iter().position(|w| w == v).expect("shared"))
                    .collect();
                let patterns: BTreeSet<Vec<u32>> = ej
                    .violating
                    .iter()
                    .map(|t| positions.iter().map(|&p| t[p]).collect())
                    .collect();
                let r: Rational = patterns
                    .iter()
                    .map(|pat| self.tuple_weight(&shared, pat))
                    .sum();
                if r > max {
                    max = r.clone();
                }
                entries.insert((i, j), r);
            }
        }
        RMatrix { entries, max }
    }

    /// One independent draw of every variable from its marginal.
    pub fn sample_product<R: Rng + ?Sized>(&self, rng: &mut R) -> Assignment {
        Assignment::total(self.sample_values(rng))
    }

    pub(crate) fn sample_values<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        self.samplers.iter().map(|c| c.sample(rng)).collect()
    }

    /// Ids of events occurring under a dense total assignment, ascending.
    pub fn bad_events(&self, values: &[u32]) -> Vec<usize> {
        self.events
            .iter()
            .filter(|e| e.occurs_in(values))
            .map(|e| e.id)
            .collect()
    }

    pub fn check_assignment(&self, values: &[u32]) -> Result<(), ModelError> {
        if values.len() != self.variables.len() {
            return Err(ModelError::MissingValue {
                var: values.len().min(self.variables.len()),
            });
        }
        for (v, &x) in values.iter().enumerate() {
            if x >= self.variables[v].domain_size {
                return Err(ModelError::AssignmentOutOfRange { var: v, value: x });
            }
        }
        Ok(())
    }
}

pub fn build_dependency_graph(instance: &Instance) -> DependencyGraph {
    let mut sets = vec![BTreeSet::new(); instance.events.len()];
    for evs in &instance.var_events {
        for &a in evs {
            for &b in evs {
                if a != b {
                    sets[a].insert(b);
                }
            }
        }
    }
    DependencyGraph::from_sets(sets)
}

fn compute_extremal(instance: &Instance) -> Result<bool, ModelError> {
    let graph = instance.dependency_graph();
    for (i, ei) in instance.events.iter().enumerate() {
        for &j in graph.neighbors(i).iter().filter(|&&j| j > i) {
            let ej = &instance.events[j];
            let work = ei.violating.len() as u64 * ej.violating.len() as u64;
            if work > PAIR_CHECK_BUDGET {
                return Err(ModelError::TooLargeToCertify {
                    first: i,
                    second: j,
                    work,
                    budget: PAIR_CHECK_BUDGET,
                });
            }
            let shared: Vec<(usize, usize)> = ei
                .vbl
                .iter()
                .enumerate()
                .filter_map(|(pi, v)| ej.vbl.iter().position(|w| w == v).map(|pj| (pi, pj)))
                .collect();
            let overlap = ei.violating.iter().any(|ti| {
                ej.violating
                    .iter()
                    .any(|tj| shared.iter().all(|&(pi, pj)| ti[pi] == tj[pj]))
            });
            if overlap {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
