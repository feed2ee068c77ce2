//! Specialised samplers for the graph applications and the path analytics
//! of the distributed lower bound.
//!
//! - [`sink_popping`]: uniform sink-free orientations.
//! - [`cycle_popping`]: uniform spanning trees oriented toward a root.
//! - [`hardcore_sample`]: hard-core configurations with fugacity `λ`.
//! - [`paths`]: `I_k`, the endpoint matrix `W_k`, and `α(λ)`.
//! - [`encode`]: the same problems as generic [`Instance`](crate::model::Instance)s,
//!   used to cross-validate the specialised samplers.

pub mod encode;
mod hardcore;
pub mod paths;
mod sink;
mod tree;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::model::ModelError;
use crate::sampler::SamplerError;

pub use encode::{encode_as_instance, App};
pub use hardcore::{
    bad_vertices, hardcore_condition, hardcore_sample, hardcore_trace, res_vertices,
    HardcoreConfig, HardcoreRun,
};
pub use paths::{
    alpha, det_w_prime, disjoint_paths_experiment, endpoint_matrix, is_stochastic, path_partition,
    DisjointPathsReport, PathEndpointMatrix, TrialRow,
};
pub use sink::{sink_popping, Orientation};
pub use tree::{cycle_popping, ArrowMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge {{{0}, {1}}} listed twice")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("root {root} is not a vertex of a graph on {n} vertices")]
    InvalidRoot { root: usize, n: usize },
    #[error("cannot build a {d}-regular graph on {n} vertices")]
    NoRegularGraph { n: usize, d: usize },
    #[error("cycle space too large to encode: rank {rank}, limit {limit}")]
    CycleSpaceTooLarge { rank: usize, limit: usize },
    #[error("path endpoint matrix needs k >= 4, got {0}")]
    PathTooShort(usize),
    #[error("path length {len} does not divide {n}")]
    PathLengthDoesNotDivide { n: usize, len: usize },
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A simple undirected graph on dense vertex ids `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Normalised `(min, max)` endpoint pairs; the index is the edge id.
    edges: Vec<(usize, usize)>,
    /// `(neighbor, edge id)`, sorted by neighbor.
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        let mut normalised = Vec::with_capacity(edges.len());
        for (id, &(a, b)) in edges.iter().enumerate() {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
            adj[a].push((b, id));
            adj[b].push((a, id));
            normalised.push(e);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: normalised,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(neighbor, edge id)` pairs sorted by neighbor.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map(Vec::len)?;
        self.adj.iter().all(|l| l.len() == d).then_some(d)
    }

    /// Component label per vertex.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(v) = stack.pop() {
                for u in self.neighbors(v) {
                    if label[u] == usize::MAX {
                        label[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// `κ(G)`, the number of connected components.
    pub fn components(&self) -> usize {
        self.component_labels()
            .into_iter()
            .max()
            .map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.components() <= 1
    }

    pub fn is_tree(&self) -> bool {
        self.n > 0 && self.is_connected() && self.edges.len() + 1 == self.n
    }

    /// `|E| − |V| + κ(G)`; the graph has `2^rank` undirected cycles (the
    /// elements of its cycle space, counting the empty one).
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.components() - self.n
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).expect("cycle is simple")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges).expect("path is simple")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Graph::new(n, &edges).expect("complete graph is simple")
    }

    /// `count` vertex-disjoint paths of `len` vertices each; path `i` uses
    /// vertices `i*len .. (i+1)*len`.
    pub fn disjoint_paths(count: usize, len: usize) -> Self {
        let edges: Vec<_> = (0..count)
            .flat_map(|p| (1..len).map(move |i| (p * len + i - 1, p * len + i)))
            .collect();
        Graph::new(count * len, &edges).expect("paths are simple")
    }

    /// Uniform simple `d`-regular graph by the pairing model with rejection.
    pub fn random_regular<R: Rng + ?Sized>(
        n: usize,
        d: usize,
        rng: &mut R,
    ) -> Result<Self, GraphError> {
        if d >= n || !(n * d).is_multiple_of(2) {
            return Err(GraphError::NoRegularGraph { n, d });
        }
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        'attempt: for _ in 0..10_000 {
            points.shuffle(rng);
            let mut seen = BTreeSet::new();
            for pair in points.chunks(2) {
                let (a, b) = (pair[0], pair[1]);
                if a == b || !seen.insert((a.min(b), a.max(b))) {
                    continue 'attempt;
                }
            }
            let edges: Vec<_> = seen.into_iter().collect();
            return Graph::new(n, &edges);
        }
        Err(GraphError::NoRegularGraph { n, d })
    }
}

/// Parses one `u v` pair per line; `#` starts a comment. Vertex labels are
/// arbitrary non-negative integers, compacted to `0..n` in ascending label
/// order. Returns the graph and the original label of each vertex.
pub fn parse_edge_list(text: &str) -> Result<(Graph, Vec<u64>), GraphError> {
    let mut raw = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_err = |message: String| GraphError::Parse {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(format!(
                "expected two vertex labels, found {}",
                fields.len()
            )));
        }
        let mut pair = [0u64; 2];
        for (slot, f) in pair.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .map_err(|_| parse_err(format!("{f:?} is not a non-negative integer")))?;
        }
        if pair[0] == pair[1] {
            return Err(parse_err(format!("self-loop at {}", pair[0])));
        }
        raw.push((idx + 1, pair[0], pair[1]));
    }
    let labels: BTreeMap<u64, usize> = raw
        .iter()
        .flat_map(|&(_, a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(raw.len());
    for (line, a, b) in raw {
        let e = (labels[&a], labels[&b]);
        if !seen.insert((e.0.min(e.1), e.0.max(e.1))) {
            return Err(GraphError::Parse {
                line,
                message: format!("duplicate edge {a} {b}"),
            });
        }
        edges.push(e);
    }
    let graph = Graph::new(labels.len(), &edges)?;
    Ok((graph, labels.into_keys().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn rejects_non_simple_input() {
        assert_eq!(Graph::new(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(
            Graph::new(2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            Graph::new(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn parses_and_compacts_labels() {
        let text = "# triangle\n10 20\n20 30 # closing soon\n\n30 10\n";
        let (g, labels) = parse_edge_list(text).unwrap();
        assert_eq!(labels, vec![10, 20, 30]);
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.cycle_rank(), 1);
        let err = parse_edge_list("1 2\n2 x\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        assert!(matches!(
            parse_edge_list("1 2\n2 1\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("4 4\n"),
            Err(GraphError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn structural_queries() {
        let g = Graph::disjoint_paths(3, 4);
        assert_eq!(g.components(), 3);
        assert!(!g.is_connected());
        assert!(Graph::path(5).is_tree());
        assert!(!Graph::cycle(5).is_tree());
        assert_eq!(Graph::complete(4).cycle_rank(), 3);
        assert_eq!(Graph::cycle(6).regular_degree(), Some(2));
    }

    #[test]
    fn random_regular_is_simple_and_regular() {
        let mut rng = rng_from_seed(5);
        let g = Graph::random_regular(64, 3, &mut rng).unwrap();
        assert_eq!(g.regular_degree(), Some(3));
        assert_eq!(g.edge_count(), 96);
        assert!(Graph::random_regular(5, 3, &mut rng).is_err());
    }
}
