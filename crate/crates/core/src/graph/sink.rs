use serde::{Deserialize, Serialize};

use super::Graph;
use crate::rng::{rng_from_seed, Categorical};
use crate::sampler::{RunStats, SamplerConfig, SamplerError};

/// One direction bit per edge. Value `0` points edge `{a, b}` (with `a < b`)
/// toward `b`, value `1` toward `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Orientation {
    pub values: Vec<u32>,
}

impl Orientation {
    pub fn head(&self, graph: &Graph, edge: usize) -> usize {
        let (a, b) = graph.edges()[edge];
        if self.values[edge] == 0 {
            b
        } else {
            a
        }
    }

    pub fn tail(&self, graph: &Graph, edge: usize) -> usize {
        let (a, b) = graph.edges()[edge];
        if self.values[edge] == 0 {
            a
        } else {
            b
        }
    }

    pub fn is_sink(&self, graph: &Graph, v: usize) -> bool {
        graph
            .incident(v)
            .iter()
            .all(|&(_, e)| self.head(graph, e) == v)
    }

    /// Sinks in ascending order. Isolated vertices count as sinks.
    pub fn sinks(&self, graph: &Graph) -> Vec<usize> {
        (0..graph.n()).filter(|&v| self.is_sink(graph, v)).collect()
    }

    pub fn is_sink_free(&self, graph: &Graph) -> bool {
        (0..graph.n()).all(|v| !self.is_sink(graph, v))
    }

    /// `tail head` per line, in edge order.
    pub fn to_arc_list(&self, graph: &Graph) -> String {
        (0..graph.edge_count())
            .map(|e| format!("{} {}\n", self.tail(graph, e), self.head(graph, e)))
            .collect()
    }
}

/// Uniform sink-free orientation by sink popping: every round redraws all
/// edges incident to a current sink.
///
/// `per_event` in the returned stats is indexed by vertex.
pub fn sink_popping(
    graph: &Graph,
    config: &SamplerConfig,
) -> Result<(Orientation, RunStats), SamplerError> {
    let coin = Categorical::uniform(2);
    let mut rng = rng_from_seed(config.seed);
    let mut orientation = Orientation {
        values: (0..graph.edge_count())
            .map(|_| coin.sample(&mut rng))
            .collect(),
    };
    let mut stats = RunStats::new(graph.n(), config.record_log);
    let mut mark = vec![false; graph.edge_count()];
    loop {
        let sinks = orientation.sinks(graph);
        if sinks.is_empty() {
            stats.halted = true;
            return Ok((orientation, stats));
        }
        if config.round_cap.is_some_and(|cap| stats.rounds >= cap) {
            return Err(SamplerError::RoundCapExceeded {
                rounds: stats.rounds,
            });
        }
        let mut edges = Vec::new();
        for &v in &sinks {
            for &(_, e) in graph.incident(v) {
                if !mark[e] {
                    mark[e] = true;
                    edges.push(e);
                }
            }
        }
        edges.sort_unstable();
        for &e in &edges {
            mark[e] = false;
            orientation.values[e] = coin.sample(&mut rng);
        }
        stats.record_round(&sinks, edges.len());
    }
}
