//! The graph applications as generic instances.
//!
//! Variable ids are chosen so that the generic samplers draw from the random
//! stream in the same order as the specialised ones: edges in edge-id order
//! for orientations, non-root vertices ascending for arrow maps, vertices
//! ascending for hard-core occupancies.

use num_traits::One;

use super::{ArrowMap, Graph, GraphError, HardcoreConfig, Orientation};
use crate::exact::Rational;
use crate::model::{EventSpec, Instance, VariableSpec};

/// Bound on `|E| − |V| + κ(G)` for the spanning-tree encoding.
pub const MAX_CYCLE_RANK: usize = 20;
/// Bound on the number of directed cycles enumerated for the encoding.
pub const MAX_DIRECTED_CYCLES: usize = 1 << 16;

#[derive(Debug, Clone, Copy)]
pub enum App<'a> {
    /// Event per vertex: the vertex is a sink. Variable per edge.
    SinkFree(&'a Graph),
    /// Event per directed cycle among non-root vertices. Variable per
    /// non-root vertex, valued by neighbour index.
    SpanningTree { graph: &'a Graph, root: usize },
    /// Event per edge: both endpoints occupied. Variable per vertex.
    Hardcore {
        graph: &'a Graph,
        lambda: &'a Rational,
    },
}

pub fn encode_as_instance(app: App<'_>) -> Result<Instance, GraphError> {
    match app {
        App::SinkFree(g) => Ok(sink_free_instance(g)),
        App::SpanningTree { graph, root } => spanning_tree_instance(graph, root),
        App::Hardcore { graph, lambda } => Ok(hardcore_instance(graph, lambda)),
    }
}

pub fn sink_free_instance(graph: &Graph) -> Instance {
    let variables = (0..graph.edge_count())
        .map(|e| VariableSpec::uniform(e, 2))
        .collect();
    let events = (0..graph.n())
        .map(|v| {
            // value 0 points toward the larger endpoint
            let pattern: Vec<(usize, u32)> = graph
                .incident(v)
                .iter()
                .map(|&(u, e)| (e, if v > u { 0 } else { 1 }))
                .collect();
            EventSpec::single(v, &pattern).expect("distinct incident edges")
        })
        .collect();
    Instance::new(variables, events).expect("sink-free encoding is well formed")
}

pub fn hardcore_instance(graph: &Graph, lambda: &Rational) -> Instance {
    let p = lambda / (Rational::one() + lambda);
    let variables = (0..graph.n())
        .map(|v| VariableSpec::binary(v, p.clone()))
        .collect();
    let events = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| EventSpec::single(e, &[(a, 1), (b, 1)]).expect("distinct endpoints"))
        .collect();
    Instance::new(variables, events).expect("hard-core encoding is well formed")
}

/// Variable `i` is the `i`-th non-root vertex.
pub fn tree_vertex_of_var(graph: &Graph, root: usize) -> Vec<usize> {
    (0..graph.n()).filter(|&v| v != root).collect()
}

pub fn spanning_tree_instance(graph: &Graph, root: usize) -> Result<Instance, GraphError> {
    let n = graph.n();
    if root >= n {
        return Err(GraphError::InvalidRoot { root, n });
    }
    if !graph.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let rank = graph.cycle_rank();
    if rank > MAX_CYCLE_RANK {
        return Err(GraphError::CycleSpaceTooLarge {
            rank,
            limit: MAX_CYCLE_RANK,
        });
    }
    let vertices = tree_vertex_of_var(graph, root);
    let mut var_of = vec![usize::MAX; n];
    for (i, &v) in vertices.iter().enumerate() {
        var_of[v] = i;
    }
    let variables = vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| VariableSpec::uniform(i, graph.degree(v) as u32))
        .collect();
    let cycles = directed_cycles(graph, root)?;
    let events = cycles
        .iter()
        .enumerate()
        .map(|(id, cycle)| {
            let pattern: Vec<(usize, u32)> = (0..cycle.len())
                .map(|i| {
                    let (v, next) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                    (var_of[v], neighbor_index(graph, v, next))
                })
                .collect();
            EventSpec::single(id, &pattern).expect("simple cycle")
        })
        .collect();
    Ok(Instance::new(variables, events)?)
}

fn neighbor_index(graph: &Graph, v: usize, u: usize) -> u32 {
    graph
        .incident(v)
        .binary_search_by_key(&u, |&(w, _)| w)
        .expect("adjacent") as u32
}

/// Directed simple cycles of length at least 2 avoiding `root`, each listed
/// from its smallest vertex.
fn directed_cycles(graph: &Graph, root: usize) -> Result<Vec<Vec<usize>>, GraphError> {
    let n = graph.n();
    let mut cycles = Vec::new();
    let mut on_path = vec![false; n];
    for s in 0..n {
        if s == root {
            continue;
        }
        let mut path = vec![s];
        on_path[s] = true;
        // explicit DFS stack of neighbour cursors
        let mut cursor = vec![0usize];
        while let Some(top) = cursor.last_mut() {
            let v = *path.last().expect("non-empty path");
            let inc = graph.incident(v);
            if *top == inc.len() {
                cursor.pop();
                on_path[v] = false;
                path.pop();
                continue;
            }
            let u = inc[*top].0;
            *top += 1;
            if u == s && path.len() >= 2 {
                cycles.push(path.clone());
                if cycles.len() > MAX_DIRECTED_CYCLES {
                    return Err(GraphError::CycleSpaceTooLarge {
                        rank: graph.cycle_rank(),
                        limit: MAX_CYCLE_RANK,
                    });
                }
            } else if u > s && u != root && !on_path[u] {
                on_path[u] = true;
                path.push(u);
                cursor.push(0);
            }
        }
    }
    Ok(cycles)
}

pub fn orientation_to_values(o: &Orientation) -> Vec<u32> {
    o.values.clone()
}

pub fn values_to_orientation(values: &[u32]) -> Orientation {
    Orientation {
        values: values.to_vec(),
    }
}

pub fn arrows_to_values(graph: &Graph, arrows: &ArrowMap) -> Vec<u32> {
    tree_vertex_of_var(graph, arrows.root)
        .into_iter()
        .map(|v| neighbor_index(graph, v, arrows.successor[v].expect("non-root")))
        .collect()
}

pub fn values_to_arrows(graph: &Graph, root: usize, values: &[u32]) -> ArrowMap {
    let mut successor = vec![None; graph.n()];
    for (i, v) in tree_vertex_of_var(graph, root).into_iter().enumerate() {
        successor[v] = Some(graph.incident(v)[values[i] as usize].0);
    }
    ArrowMap { root, successor }
}

pub fn hardcore_to_values(config: &HardcoreConfig) -> Vec<u32> {
    config.occupied.iter().map(|&o| o as u32).collect()
}

pub fn values_to_hardcore(values: &[u32]) -> HardcoreConfig {
    HardcoreConfig {
        occupied: values.iter().map(|&v| v == 1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn sink_and_tree_encodings_are_extremal() {
        let c4 = Graph::cycle(4);
        assert!(sink_free_instance(&c4).is_extremal().unwrap());
        let k4 = Graph::complete(4);
        let tree = spanning_tree_instance(&k4, 0).unwrap();
        assert!(tree.is_extremal().unwrap());
        // K3 on the non-root vertices: three 2-cycles and two 3-cycles
        assert_eq!(tree.num_events(), 5);
    }

    #[test]
    fn hardcore_encoding_is_not_extremal() {
        let p3 = Graph::path(3);
        assert!(!hardcore_instance(&p3, &int(1)).is_extremal().unwrap());
        let p2 = Graph::path(2);
        assert!(hardcore_instance(&p2, &int(1)).is_extremal().unwrap());
    }

    #[test]
    fn sink_events_match_orientation_sinks() {
        let g = Graph::complete(4);
        let inst = sink_free_instance(&g);
        for mask in 0u32..(1 << g.edge_count()) {
            let values: Vec<u32> = (0..g.edge_count()).map(|e| (mask >> e) & 1).collect();
            let o = values_to_orientation(&values);
            assert_eq!(inst.bad_events(&values), o.sinks(&g));
        }
    }

    #[test]
    fn arrow_round_trip() {
        let g = Graph::complete(4);
        let arrows = ArrowMap {
            root: 1,
            successor: vec![Some(1), None, Some(3), Some(2)],
        };
        let values = arrows_to_values(&g, &arrows);
        assert_eq!(values_to_arrows(&g, 1, &values), arrows);
        let inst = spanning_tree_instance(&g, 1).unwrap();
        assert_eq!(inst.bad_events(&values).len(), 1);
    }

    #[test]
    fn rejects_large_cycle_space() {
        let g = Graph::complete(8);
        assert!(matches!(
            spanning_tree_instance(&g, 0),
            Err(GraphError::CycleSpaceTooLarge { .. })
        ));
    }
}
