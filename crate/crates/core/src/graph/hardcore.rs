use num_traits::One;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::exact::{int, sqrt_e_bounds, Rational};
use crate::rng::{rng_from_seed, Categorical};
use crate::sampler::{RunStats, SamplerConfig, SamplerError};

/// Occupancy indicator per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HardcoreConfig {
    pub occupied: Vec<bool>,
}

impl HardcoreConfig {
    pub fn members(&self) -> Vec<usize> {
        (0..self.occupied.len())
            .filter(|&v| self.occupied[v])
            .collect()
    }

    pub fn is_independent(&self, graph: &Graph) -> bool {
        graph
            .edges()
            .iter()
            .all(|&(a, b)| !(self.occupied[a] && self.occupied[b]))
    }

    pub fn to_bits(&self) -> String {
        self.occupied
            .iter()
            .map(|&o| if o { '1' } else { '0' })
            .collect()
    }
}

/// Occupied vertices with at least one occupied neighbour, ascending.
pub fn bad_vertices(graph: &Graph, config: &HardcoreConfig) -> Vec<usize> {
    let occ = &config.occupied;
    (0..graph.n())
        .filter(|&v| occ[v] && graph.neighbors(v).any(|u| occ[u]))
        .collect()
}

/// Bad vertices together with all their neighbours, ascending.
pub fn res_vertices(graph: &Graph, config: &HardcoreConfig) -> Vec<usize> {
    let mut in_res = vec![false; graph.n()];
    for v in bad_vertices(graph, config) {
        in_res[v] = true;
        for u in graph.neighbors(v) {
            in_res[u] = true;
        }
    }
    (0..graph.n()).filter(|&v| in_res[v]).collect()
}

/// Result of a traced hard-core run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardcoreRun {
    pub config: HardcoreConfig,
    pub stats: RunStats,
    /// Number of edges with both endpoints occupied before each round, with
    /// a final `0` for the accepted state.
    pub bad_edges: Vec<u64>,
}

/// Hard-core sample at fugacity `lambda`. Each round redraws every vertex
/// within distance one of a bad vertex.
///
/// `per_event` in the returned stats is indexed by edge and counts the edges
/// with at least one bad endpoint.
pub fn hardcore_sample(
    graph: &Graph,
    lambda: &Rational,
    config: &SamplerConfig,
) -> Result<(HardcoreConfig, RunStats), SamplerError> {
    hardcore_trace(graph, lambda, config).map(|run| (run.config, run.stats))
}

pub fn hardcore_trace(
    graph: &Graph,
    lambda: &Rational,
    config: &SamplerConfig,
) -> Result<HardcoreRun, SamplerError> {
    assert!(*lambda > int(0), "fugacity must be positive");
    let coin = Categorical::bernoulli(&(lambda / (Rational::one() + lambda)));
    let mut rng = rng_from_seed(config.seed);
    let mut state = HardcoreConfig {
        occupied: (0..graph.n()).map(|_| coin.sample(&mut rng) == 1).collect(),
    };
    let mut stats = RunStats::new(graph.edge_count(), config.record_log);
    let mut bad_edges = Vec::new();
    loop {
        let occ = &state.occupied;
        let bad_count = graph
            .edges()
            .iter()
            .filter(|&&(a, b)| occ[a] && occ[b])
            .count();
        bad_edges.push(bad_count as u64);
        if bad_count == 0 {
            stats.halted = true;
            return Ok(HardcoreRun {
                config: state,
                stats,
                bad_edges,
            });
        }
        if config.round_cap.is_some_and(|cap| stats.rounds >= cap) {
            return Err(SamplerError::RoundCapExceeded {
                rounds: stats.rounds,
            });
        }
        let bad = bad_vertices(graph, &state);
        let mut is_bad = vec![false; graph.n()];
        for &v in &bad {
            is_bad[v] = true;
        }
        let events: Vec<usize> = (0..graph.edge_count())
            .filter(|&e| {
                let (a, b) = graph.edges()[e];
                is_bad[a] || is_bad[b]
            })
            .collect();
        let res = res_vertices(graph, &state);
        for &v in &res {
            state.occupied[v] = coin.sample(&mut rng) == 1;
        }
        stats.record_round(&events, res.len());
    }
}

/// Certified check of `λ <= 1 / (2·√e·d − 1)`; returns `false` when the
/// certified bracket of `√e` cannot decide.
pub fn hardcore_condition(lambda: &Rational, d: usize) -> bool {
    if d == 0 {
        return true;
    }
    let (_, sqrt_e_hi) = sqrt_e_bounds();
    let factor = int(2) * sqrt_e_hi * int(d as i64) - int(1);
    lambda * factor <= int(1)
}
