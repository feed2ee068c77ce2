//! CNF front end: DIMACS I/O, degree and intersection statistics, the
//! sufficient conditions for fast sampling, uniform solution sampling, and
//! fixture generators.
//!
//! Variables are numbered from 1 in formulas and literals; in the compiled
//! [`Instance`] variable `v` has id `v - 1` and value 1 means true.

mod dimacs;
mod fixtures;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{e_bounds, int, pow2, to_f64};
use crate::model::{EventSpec, Instance, ModelError, VariableSpec};
use crate::sampler::{self, RunStats, SamplerConfig, SamplerError, SamplerKind};

pub use dimacs::{parse_dimacs, write_dimacs};
pub use fixtures::{hard_example, monotone_cnf_from_graph, sink_free_cnf, MonotoneCnf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        num_vars: usize,
    },
    #[error("line {line}: clause starting here is not terminated by 0")]
    Unterminated { line: usize },
    #[error("line {line}: tautological clause on variable {var}")]
    Tautology { line: usize, var: usize },
    #[error("line {line}: literal {literal} repeated in one clause")]
    RepeatedLiteral { line: usize, literal: i64 },
    #[error("header declares {expected} clauses, found {found}")]
    ClauseCount { expected: usize, found: usize },
    #[error(
        "formula is not extremal: some dependent clauses agree in sign on every shared variable"
    )]
    NotExtremal,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

fn validate_clause(clause: &[i64], num_vars: usize, line: usize) -> Result<(), CnfError> {
    let mut seen = BTreeSet::new();
    for &lit in clause {
        let var = lit.unsigned_abs() as usize;
        if lit == 0 || var > num_vars {
            return Err(CnfError::LiteralOutOfRange {
                line,
                literal: lit,
                num_vars,
            });
        }
        if seen.contains(&-lit) {
            return Err(CnfError::Tautology { line, var });
        }
        if !seen.insert(lit) {
            return Err(CnfError::RepeatedLiteral { line, literal: lit });
        }
    }
    Ok(())
}

impl CnfFormula {
    /// Validates every clause; error lines are 1-based clause indices.
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, CnfError> {
        for (i, c) in clauses.iter().enumerate() {
            validate_clause(c, num_vars, i + 1)?;
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// `values[v - 1] == 1` means variable `v` is true.
    pub fn is_satisfied(&self, values: &[u32]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&lit| {
                let v = values[lit.unsigned_abs() as usize - 1] == 1;
                v == (lit > 0)
            })
        })
    }

    /// One event per clause with the single violating tuple "all literals
    /// false", over uniform binary variables.
    pub fn to_instance(&self) -> Instance {
        let variables = (0..self.num_vars)
            .map(|v| VariableSpec::uniform(v, 2))
            .collect();
        let events = self
            .clauses
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let lits: Vec<(usize, bool)> = c
                    .iter()
                    .map(|&l| (l.unsigned_abs() as usize - 1, l > 0))
                    .collect();
                EventSpec::clause(i, &lits).expect("validated clause")
            })
            .collect();
        Instance::new(variables, events).expect("validated formula compiles")
    }
}

/// Clause width of a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Width {
    Uniform(usize),
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfStats {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub width: Width,
    /// Largest number of clauses containing one variable.
    pub degree: usize,
    /// Smallest number of shared variables over dependent clause pairs;
    /// `None` when no two clauses share a variable.
    pub intersection: Option<usize>,
    /// Every dependent clause pair has a shared variable with opposite signs.
    pub extremal: bool,
    /// Maximum degree of the clause dependency graph.
    pub dependency_degree: usize,
}

pub fn cnf_stats(formula: &CnfFormula) -> CnfStats {
    let mut occurrences: Vec<Vec<(usize, bool)>> = vec![Vec::new(); formula.num_vars];
    for (i, c) in formula.clauses.iter().enumerate() {
        for &lit in c {
            occurrences[lit.unsigned_abs() as usize - 1].push((i, lit > 0));
        }
    }
    // (shared count, some shared variable has opposite signs)
    let mut pairs: BTreeMap<(usize, usize), (usize, bool)> = BTreeMap::new();
    for occ in &occurrences {
        for a in 0..occ.len() {
            for b in a + 1..occ.len() {
                let (i, si) = occ[a];
                let (j, sj) = occ[b];
                let entry = pairs.entry((i.min(j), i.max(j))).or_insert((0, false));
                entry.0 += 1;
                entry.1 |= si != sj;
            }
        }
    }
    let mut dep_degree = vec![0usize; formula.clauses.len()];
    for &(i, j) in pairs.keys() {
        dep_degree[i] += 1;
        dep_degree[j] += 1;
    }
    let widths: BTreeSet<usize> = formula.clauses.iter().map(Vec::len).collect();
    let width = match widths.len() {
        0 => Width::Uniform(0),
        1 => Width::Uniform(*widths.first().expect("one width")),
        _ => Width::Mixed,
    };
    CnfStats {
        num_vars: formula.num_vars,
        num_clauses: formula.clauses.len(),
        width,
        degree: occurrences.iter().map(Vec::len).max().unwrap_or(0),
        intersection: pairs.values().map(|&(c, _)| c).min(),
        extremal: pairs.values().all(|&(_, opposite)| opposite),
        dependency_degree: dep_degree.into_iter().max().unwrap_or(0),
    }
}

/// Certified check of `d <= 2^k / (e·k) + 1`, i.e. `(d − 1)·e·k <= 2^k`.
/// Uses the upper end of the certified bracket of `e`, so an undecidable
/// comparison reports `false`.
pub fn check_extremal_condition(k: usize, d: usize) -> bool {
    if k == 0 || d == 0 {
        return false;
    }
    let (_, e_hi) = e_bounds();
    int(d as i64 - 1) * e_hi * int(k as i64) <= pow2(k as i64)
}

/// The three parts of the sharing condition, each certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharingVerdict {
    /// `d >= 3` and `d·k >= 2^(3e)`.
    pub size_ok: bool,
    /// `d <= 2^(k/2) / (6e)`.
    pub degree_ok: bool,
    /// `s >= min{log2(d·k), k/2}`.
    pub intersection_ok: bool,
}

impl SharingVerdict {
    pub fn holds(&self) -> bool {
        self.size_ok && self.degree_ok && self.intersection_ok
    }
}

/// Slack used when comparing `log2(d·k)` against the bracket of `3e` in
/// floating point.
const LOG_MARGIN: f64 = 1e-12;

pub fn sharing_verdict(k: usize, d: usize, s: usize) -> SharingVerdict {
    let (_, e_hi) = e_bounds();
    let dk = (d as u128) * (k as u128);
    // 2^(3e) has no closed form; compare log2(dk) with 3·e_hi plus a margin
    // that dominates the rounding of both sides.
    let size_ok = d >= 3 && dk > 0 && (dk as f64).log2() >= 3.0 * to_f64(&e_hi) + LOG_MARGIN;
    // (6·e·d)² <= 2^k
    let six_e_d = int(6) * &e_hi * int(d as i64);
    let degree_ok = &six_e_d * &six_e_d <= pow2(k as i64);
    // s >= k/2, or 2^s >= dk
    let intersection_ok = 2 * s >= k || (s < 128 && (1u128 << s) >= dk);
    SharingVerdict {
        size_ok,
        degree_ok,
        intersection_ok,
    }
}

pub fn check_sharing_condition(k: usize, d: usize, s: usize) -> bool {
    sharing_verdict(k, d, s).holds()
}

/// Bit `v - 1` of the result is the value of variable `v`.
pub type CnfSolution = Vec<bool>;

/// Uniform satisfying assignment of `formula`.
pub fn sample_cnf(
    formula: &CnfFormula,
    kind: SamplerKind,
    config: &SamplerConfig,
) -> Result<(CnfSolution, RunStats), CnfError> {
    if kind == SamplerKind::ExtremalPrs && !cnf_stats(formula).extremal {
        return Err(CnfError::NotExtremal);
    }
    let instance = formula.to_instance();
    let cfg = SamplerConfig {
        kind,
        // extremality was decided above from the signs
        check_extremal: false,
        ..config.clone()
    };
    let (assignment, stats) = sampler::run(&instance, &cfg)?;
    let values = assignment
        .to_values()
        .expect("sampler returns a total assignment");
    Ok((values.into_iter().map(|v| v == 1).collect(), stats))
}

/// `1 -2 3 ...` in variable order.
pub fn format_literals(solution: &[bool]) -> String {
    solution
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if b {
                format!("{}", i + 1)
            } else {
                format!("-{}", i + 1)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// `0`/`1` characters in variable order.
pub fn format_bits(solution: &[bool]) -> String {
    solution
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect()
}
