use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::VerifyError;
use crate::cnf::CnfFormula;
use crate::exact::{as_string, pow, to_f64, Rational};
use crate::graph::{Graph, Orientation};
use crate::model::Instance;

/// Largest product space enumerated exhaustively.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;

/// Exhaustive description of the target distribution of an instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    /// Assignments avoiding every event, in lexicographic order.
    pub valid_assignments: Vec<Vec<u32>>,
    /// Product probability conditioned on avoiding every event.
    #[serde(serialize_with = "as_string::vec::serialize")]
    pub probabilities: Vec<Rational>,
    /// `false` when no assignment is valid and the conditional law does not
    /// exist.
    pub defined: bool,
    /// Product probability that no event occurs.
    #[serde(serialize_with = "as_string::serialize")]
    pub q_empty_check: Rational,
}

impl OracleResult {
    /// Conditional probability of each valid assignment as `f64`.
    pub fn distribution(&self) -> BTreeMap<Vec<u32>, f64> {
        self.valid_assignments
            .iter()
            .cloned()
            .zip(self.probabilities.iter().map(to_f64))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.valid_assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valid_assignments.is_empty()
    }
}

fn check_budget(instance: &Instance) -> Result<(), VerifyError> {
    let mut states: u128 = 1;
    for v in instance.variables() {
        states = states.saturating_mul(v.domain_size as u128);
    }
    if states > ENUMERATION_BUDGET as u128 {
        return Err(VerifyError::Budget {
            states,
            budget: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Visits every total assignment in lexicographic order with its product
/// probability.
fn for_each_state(instance: &Instance, mut visit: impl FnMut(&[u32], &Rational)) {
    let vars = instance.variables();
    let n = vars.len();
    let mut values = vec![0u32; n];
    // prefix[i] = product of the weights of values[0..i]
    let mut prefix = vec![Rational::one(); n + 1];
    for i in 0..n {
        prefix[i + 1] = &prefix[i] * &vars[i].weights[0];
    }
    loop {
        visit(&values, &prefix[n]);
        // advance the odometer from the last position
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            values[i] += 1;
            if values[i] < vars[i].domain_size {
                break;
            }
            values[i] = 0;
        }
        for j in i..n {
            prefix[j + 1] = &prefix[j] * &vars[j].weights[values[j] as usize];
        }
    }
}

pub fn enumerate_valid(instance: &Instance) -> Result<OracleResult, VerifyError> {
    check_budget(instance)?;
    let mut valid = Vec::new();
    let mut weights = Vec::new();
    let mut total = Rational::zero();
    for_each_state(instance, |values, w| {
        if instance.events().iter().all(|e| !e.occurs_in(values)) {
            if !w.is_zero() {
                valid.push(values.to_vec());
                weights.push(w.clone());
            }
            total += w;
        }
    });
    let defined = !total.is_zero();
    let probabilities = if defined {
        weights.iter().map(|w| w / &total).collect()
    } else {
        Vec::new()
    };
    if !defined {
        valid.clear();
    }
    Ok(OracleResult {
        valid_assignments: valid,
        probabilities,
        defined,
        q_empty_check: total,
    })
}

/// Product probability that no event occurs, without storing assignments.
pub fn pr_no_bad_event(instance: &Instance) -> Result<Rational, VerifyError> {
    check_budget(instance)?;
    let mut total = Rational::zero();
    for_each_state(instance, |values, w| {
        if instance.events().iter().all(|e| !e.occurs_in(values)) {
            total += w;
        }
    });
    Ok(total)
}

/// `(Z_0, Z_1)`: orientations with no sink and with exactly one sink.
pub fn sink_orientation_counts(graph: &Graph) -> Result<(u64, u64), VerifyError> {
    let m = graph.edge_count();
    if m > 24 {
        return Err(VerifyError::Budget {
            states: 1u128 << m,
            budget: ENUMERATION_BUDGET,
        });
    }
    let (mut z0, mut z1) = (0, 0);
    for mask in 0u64..(1 << m) {
        let o = Orientation {
            values: (0..m).map(|e| ((mask >> e) & 1) as u32).collect(),
        };
        match o.sinks(graph).len() {
            0 => z0 += 1,
            1 => z1 += 1,
            _ => {}
        }
    }
    Ok((z0, z1))
}

/// Number of spanning trees, by checking every `(n−1)`-edge subset for
/// acyclicity.
pub fn count_spanning_trees(graph: &Graph) -> Result<u64, VerifyError> {
    let m = graph.edge_count();
    let n = graph.n();
    if m > 24 {
        return Err(VerifyError::Budget {
            states: 1u128 << m,
            budget: ENUMERATION_BUDGET,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    let mut count = 0;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut acyclic = true;
        for e in 0..m {
            if mask >> e & 1 == 1 {
                let (a, b) = graph.edges()[e];
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    acyclic = false;
                    break;
                }
                parent[ra] = rb;
            }
        }
        if acyclic {
            count += 1;
        }
    }
    Ok(count)
}

/// Hard-core partition function `Σ_I λ^|I|` by enumeration.
pub fn hardcore_partition(graph: &Graph, lambda: &Rational) -> Result<Rational, VerifyError> {
    let n = graph.n();
    if n > 24 {
        return Err(VerifyError::Budget {
            states: 1u128 << n,
            budget: ENUMERATION_BUDGET,
        });
    }
    let mut z = Rational::zero();
    for mask in 0u32..(1 << n) {
        if graph
            .edges()
            .iter()
            .all(|&(a, b)| mask >> a & 1 == 0 || mask >> b & 1 == 0)
        {
            z += pow(lambda, mask.count_ones() as usize);
        }
    }
    Ok(z)
}

/// Endpoint law of the hard-core model on a `k`-vertex path by direct
/// weighted enumeration of its independent sets.
pub fn path_endpoint_enumeration(k: usize, lambda: &Rational) -> [[Rational; 2]; 2] {
    assert!((2..=24).contains(&k), "path length out of range");
    let mut w: [[Rational; 2]; 2] = Default::default();
    let mut z = Rational::zero();
    for mask in 0u32..(1 << k) {
        if mask & (mask >> 1) != 0 {
            continue;
        }
        let weight = pow(lambda, mask.count_ones() as usize);
        let (u, v) = ((mask & 1) as usize, (mask >> (k - 1) & 1) as usize);
        w[u][v] += &weight;
        z += weight;
    }
    for row in &mut w {
        for x in row {
            *x = &*x / &z;
        }
    }
    w
}

/// `(Z_CNF,0, Z_CNF,1)`: assignments violating no clause and exactly one.
pub fn solution_counts(formula: &CnfFormula) -> Result<(u64, u64), VerifyError> {
    let n = formula.num_vars;
    if n > 24 {
        return Err(VerifyError::Budget {
            states: 1u128 << n,
            budget: ENUMERATION_BUDGET,
        });
    }
    let (mut z0, mut z1) = (0, 0);
    for mask in 0u32..(1 << n) {
        let violated = formula
            .clauses
            .iter()
            .filter(|c| {
                !c.iter().any(|&lit| {
                    let bit = mask >> (lit.unsigned_abs() - 1) & 1 == 1;
                    bit == (lit > 0)
                })
            })
            .take(2)
            .count();
        match violated {
            0 => z0 += 1,
            1 => z1 += 1,
            _ => {}
        }
    }
    Ok((z0, z1))
}
