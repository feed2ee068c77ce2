use std::collections::BTreeSet;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cnf::CnfFormula;
use crate::exact::{ratio, Rational};
use crate::model::{DependencyGraph, EventSpec, Instance, VariableSpec};
use crate::shearer::QCalculator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomCnfParams {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub min_width: usize,
    pub max_width: usize,
}

impl Default for RandomCnfParams {
    fn default() -> Self {
        RandomCnfParams {
            num_vars: 8,
            num_clauses: 6,
            min_width: 1,
            max_width: 3,
        }
    }
}

/// Clauses over distinct variables with uniform random signs.
pub fn random_cnf<R: Rng + ?Sized>(rng: &mut R, params: &RandomCnfParams) -> CnfFormula {
    let clauses = (0..params.num_clauses)
        .map(|_| {
            let width = rng.gen_range(params.min_width..=params.max_width.min(params.num_vars));
            sample_indices(rng, params.num_vars, width)
                .into_iter()
                .map(|v| {
                    let lit = v as i64 + 1;
                    if rng.gen_bool(0.5) {
                        lit
                    } else {
                        -lit
                    }
                })
                .collect()
        })
        .collect();
    CnfFormula::new(params.num_vars, clauses).expect("distinct variables per clause")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomInstanceParams {
    pub num_vars: usize,
    pub max_domain: u32,
    pub num_events: usize,
    pub max_event_vars: usize,
    /// Upper bound on violating tuples per event.
    pub max_tuples: usize,
    /// Largest product state space accepted.
    pub max_states: u64,
}

impl Default for RandomInstanceParams {
    fn default() -> Self {
        RandomInstanceParams {
            num_vars: 6,
            max_domain: 3,
            num_events: 5,
            max_event_vars: 3,
            max_tuples: 3,
            max_states: 1 << 20,
        }
    }
}

fn random_variables<R: Rng + ?Sized>(
    rng: &mut R,
    params: &RandomInstanceParams,
) -> Vec<VariableSpec> {
    loop {
        let vars: Vec<VariableSpec> = (0..params.num_vars)
            .map(|id| {
                let d = rng.gen_range(2..=params.max_domain.max(2));
                // positive integer weights, normalised; small denominators
                let raw: Vec<i64> = (0..d).map(|_| rng.gen_range(1..=4)).collect();
                let total: i64 = raw.iter().sum();
                VariableSpec::new(id, raw.iter().map(|&w| ratio(w, total)).collect())
            })
            .collect();
        let states: u128 = vars.iter().map(|v| v.domain_size as u128).product();
        if states <= params.max_states as u128 {
            return vars;
        }
    }
}

fn random_event<R: Rng + ?Sized>(
    rng: &mut R,
    id: usize,
    vars: &[VariableSpec],
    params: &RandomInstanceParams,
) -> EventSpec {
    let k = rng.gen_range(1..=params.max_event_vars.min(vars.len()));
    let mut vbl: Vec<usize> = sample_indices(rng, vars.len(), k).into_vec();
    vbl.sort_unstable();
    let space: u64 = vbl.iter().map(|&v| vars[v].domain_size as u64).product();
    // leave at least one tuple non-violating so the event is not certain
    let t = rng.gen_range(1..=(params.max_tuples as u64).min(space - 1).max(1));
    let mut tuples = BTreeSet::new();
    while (tuples.len() as u64) < t {
        let tuple: Vec<u32> = vbl
            .iter()
            .map(|&v| rng.gen_range(0..vars[v].domain_size))
            .collect();
        tuples.insert(tuple);
    }
    EventSpec::new(id, vbl, tuples.into_iter().collect()).expect("generated event is valid")
}

/// Random instance with weighted variables and explicit violating tuples.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, params: &RandomInstanceParams) -> Instance {
    let vars = random_variables(rng, params);
    let events = (0..params.num_events)
        .map(|id| random_event(rng, id, &vars, params))
        .collect();
    Instance::new(vars, events).expect("generated instance is valid")
}

fn disjoint(a: &EventSpec, b: &EventSpec) -> bool {
    // positions of shared variables in each event
    let shared: Vec<(usize, usize)> = a
        .vbl()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| b.vbl().binary_search(v).ok().map(|j| (i, j)))
        .collect();
    a.violating().iter().all(|ta| {
        b.violating()
            .iter()
            .all(|tb| shared.iter().any(|&(i, j)| ta[i] != tb[j]))
    })
}

/// Random extremal instance: events are proposed one at a time and kept
/// only when disjoint from every kept event they share a variable with.
/// May return fewer than `num_events` events if proposals keep failing.
pub fn random_extremal_instance<R: Rng + ?Sized>(
    rng: &mut R,
    params: &RandomInstanceParams,
) -> Instance {
    let vars = random_variables(rng, params);
    let mut events: Vec<EventSpec> = Vec::new();
    let mut attempts = 0;
    while events.len() < params.num_events && attempts < 200 * params.num_events.max(1) {
        attempts += 1;
        let candidate = random_event(rng, events.len(), &vars, params);
        let ok = events.iter().all(|e| {
            let shares = e
                .vbl()
                .iter()
                .any(|v| candidate.vbl().binary_search(v).is_ok());
            !shares || disjoint(e, &candidate)
        });
        if ok {
            events.push(candidate);
        }
    }
    Instance::new(vars, events).expect("generated instance is valid")
}

/// Whether `p` lies in Shearer's region: `q_∅` of every induced subgraph
/// is positive.
pub fn shearer_region(graph: &DependencyGraph, p: &[Rational]) -> bool {
    let Ok(mut calc) = QCalculator::new(graph, p) else {
        return false;
    };
    let full = calc.full_mask();
    let zero = Rational::from_integer(0.into());
    (0..=full).all(|mask| calc.q_empty_of(mask) > zero)
}
