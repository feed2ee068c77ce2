use serde::{Deserialize, Serialize};

use super::CnfFormula;
use crate::graph::Graph;

/// The chained extremal formula with a unique solution whose one-clause
/// relaxation has at least `3^m` solutions.
///
/// Variables: `x_1..x_m` are `1..=m`, `y_1..y_2m` are `m+1..=3m`.
pub fn hard_example(m: usize) -> CnfFormula {
    assert!(m >= 1, "hard_example needs m >= 1");
    let x = |i: usize| i as i64;
    let y = |j: usize| (m + j) as i64;
    let mut clauses = vec![
        vec![x(1)],
        vec![-x(1), y(1), y(2)],
        vec![-x(1), y(1), -y(2)],
        vec![-x(1), -y(1), y(2)],
    ];
    for k in 1..m {
        clauses.push(vec![-y(2 * k - 1), -y(2 * k), x(k + 1)]);
        clauses.push(vec![-x(k + 1), y(2 * k + 1), y(2 * k + 2)]);
        clauses.push(vec![-x(k + 1), y(2 * k + 1), -y(2 * k + 2)]);
        clauses.push(vec![-x(k + 1), -y(2 * k + 1), y(2 * k + 2)]);
    }
    CnfFormula::new(3 * m, clauses).expect("hard example is well formed")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneCnf {
    pub formula: CnfFormula,
    /// Whether the source graph was regular; the degree and intersection
    /// guarantees of the construction assume it.
    pub regular: bool,
}

/// One monotone clause `v_1 ∨ … ∨ v_s ∨ u_1 ∨ … ∨ u_s` per edge `{u, v}`.
/// Vertex `v` owns variables `v·s + 1 ..= (v+1)·s`.
pub fn monotone_cnf_from_graph(graph: &Graph, s: usize) -> MonotoneCnf {
    assert!(s >= 1, "block size must be at least 1");
    let block = |v: usize| (v * s + 1..=(v + 1) * s).map(|x| x as i64);
    let clauses = graph
        .edges()
        .iter()
        .map(|&(a, b)| block(a).chain(block(b)).collect())
        .collect();
    MonotoneCnf {
        formula: CnfFormula::new(graph.n() * s, clauses).expect("blocks are disjoint"),
        regular: graph.regular_degree().is_some(),
    }
}

/// One clause per vertex saying some incident edge points away from it.
/// Variable `e + 1` is true when edge `e = {a, b}` (`a < b`) points to `b`.
pub fn sink_free_cnf(graph: &Graph) -> CnfFormula {
    let clauses = (0..graph.n())
        .map(|v| {
            graph
                .incident(v)
                .iter()
                .map(|&(u, e)| if v < u { e as i64 + 1 } else { -(e as i64 + 1) })
                .collect()
        })
        .collect();
    CnfFormula::new(graph.edge_count(), clauses).expect("incident edges are distinct")
}

#[cfg(test)]
mod tests {
    use super::super::{cnf_stats, Width};
    use super::*;

    #[test]
    fn hard_example_shape() {
        let f = hard_example(1);
        assert_eq!(f.num_vars, 3);
        assert_eq!(f.clauses.len(), 4);
        for m in 1..=4 {
            let f = hard_example(m);
            assert_eq!(f.clauses.len(), 4 * m);
            let s = cnf_stats(&f);
            assert!(s.extremal);
            assert_eq!(s.width, Width::Mixed);
            assert!(f.is_satisfied(&vec![1; 3 * m]));
        }
    }

    #[test]
    fn monotone_triangle() {
        let out = monotone_cnf_from_graph(&Graph::cycle(3), 2);
        assert!(out.regular);
        let s = cnf_stats(&out.formula);
        assert_eq!(s.width, Width::Uniform(4));
        assert_eq!(s.degree, 2);
        assert_eq!(s.intersection, Some(2));
        assert!(out.formula.clauses.iter().flatten().all(|&l| l > 0));
        assert!(!monotone_cnf_from_graph(&Graph::path(3), 1).regular);
    }

    #[test]
    fn sink_free_cnf_is_extremal_with_degree_two() {
        for g in [Graph::cycle(5), Graph::complete(4)] {
            let s = cnf_stats(&sink_free_cnf(&g));
            assert!(s.extremal);
            assert_eq!(s.degree, 2);
        }
    }
}
