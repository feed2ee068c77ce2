use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};
use crate::rng::{rng_from_seed, Categorical, SamplerRng};
use crate::sampler::{RunStats, SamplerConfig, SamplerError};

/// Each non-root vertex points at one of its neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArrowMap {
    pub root: usize,
    pub successor: Vec<Option<usize>>,
}

impl ArrowMap {
    /// Vertex sets of the cycles of the arrow map, each sorted, listed by
    /// ascending minimum vertex.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.successor.len();
        // 0 = unvisited, 1 = on the current walk, 2 = finished
        let mut state = vec![0u8; n];
        let mut pos = vec![usize::MAX; n];
        let mut cycles = Vec::new();
        let mut path = Vec::new();
        for start in 0..n {
            if state[start] != 0 || start == self.root {
                continue;
            }
            path.clear();
            let mut u = start;
            while u != self.root && state[u] == 0 {
                state[u] = 1;
                pos[u] = path.len();
                path.push(u);
                u = self.successor[u].expect("non-root vertex has a successor");
            }
            if u != self.root && state[u] == 1 {
                let mut cycle = path[pos[u]..].to_vec();
                cycle.sort_unstable();
                cycles.push(cycle);
            }
            for &w in &path {
                state[w] = 2;
            }
        }
        cycles.sort_unstable_by_key(|c| c[0]);
        cycles
    }

    pub fn is_spanning_tree(&self) -> bool {
        self.cycles().is_empty()
    }

    /// Undirected tree edges `(child, parent)` in child order.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        self.successor
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.map(|p| (v, p)))
            .collect()
    }

    /// Parent of each vertex separated by spaces; the root prints as `-1`.
    pub fn parent_line(&self) -> String {
        self.successor
            .iter()
            .map(|s| s.map_or_else(|| "-1".to_string(), |p| p.to_string()))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Uniform spanning tree oriented toward `root`, by cycle popping. Every
/// round redraws the arrows of all vertices on a current cycle.
///
/// `per_event` in the returned stats counts popped cycles by their smallest
/// vertex.
pub fn cycle_popping(
    graph: &Graph,
    root: usize,
    config: &SamplerConfig,
) -> Result<(ArrowMap, RunStats), GraphError> {
    let n = graph.n();
    if root >= n {
        return Err(GraphError::InvalidRoot { root, n });
    }
    if !graph.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let choices: Vec<Option<Categorical>> = (0..n)
        .map(|v| (v != root).then(|| Categorical::uniform(graph.degree(v))))
        .collect();
    let mut rng = rng_from_seed(config.seed);
    let draw = |v: usize, rng: &mut SamplerRng| {
        let idx = choices[v].as_ref().expect("non-root").sample(rng) as usize;
        graph.incident(v)[idx].0
    };
    let mut arrows = ArrowMap {
        root,
        successor: vec![None; n],
    };
    for v in (0..n).filter(|&v| v != root) {
        arrows.successor[v] = Some(draw(v, &mut rng));
    }
    let mut stats = RunStats::new(n, config.record_log);
    loop {
        let cycles = arrows.cycles();
        if cycles.is_empty() {
            stats.halted = true;
            return Ok((arrows, stats));
        }
        if config.round_cap.is_some_and(|cap| stats.rounds >= cap) {
            return Err(SamplerError::RoundCapExceeded {
                rounds: stats.rounds,
            }
            .into());
        }
        let mut vertices: Vec<usize> = cycles.iter().flatten().copied().collect();
        vertices.sort_unstable();
        for &v in &vertices {
            arrows.successor[v] = Some(draw(v, &mut rng));
        }
        let keys: Vec<usize> = cycles.iter().map(|c| c[0]).collect();
        stats.record_round(&keys, vertices.len());
    }
}
