//! Hard-core statistics on paths: partition function, endpoint correlation
//! matrix, and the disjoint-paths round experiment.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{hardcore_sample, Graph, GraphError};
use crate::exact::{to_f64, Rational};
use crate::rng::derive_seed;
use crate::sampler::{SamplerConfig, SamplerError};

/// `I_k`, the hard-core partition function of a path on `k` vertices.
pub fn path_partition(k: usize, lambda: &Rational) -> Rational {
    let mut prev = Rational::one();
    let mut cur = Rational::one() + lambda;
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = &cur + lambda * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Joint law of the two endpoint occupancies of a hard-core path:
/// `w[i][j] = Pr(σ(u) = i, σ(v) = j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathEndpointMatrix {
    pub k: usize,
    #[serde(serialize_with = "crate::exact::as_string::serialize")]
    pub lambda: Rational,
    #[serde(serialize_with = "serialize_matrix")]
    pub w: [[Rational; 2]; 2],
}

fn serialize_matrix<S: serde::Serializer>(w: &[[Rational; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
    w.iter()
        .map(|row| row.iter().map(ToString::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .serialize(s)
}

impl PathEndpointMatrix {
    pub fn det(&self) -> Rational {
        &self.w[0][0] * &self.w[1][1] - &self.w[0][1] * &self.w[1][0]
    }

    pub fn sum(&self) -> Rational {
        self.w.iter().flatten().sum()
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [
            [to_f64(&self.w[0][0]), to_f64(&self.w[0][1])],
            [to_f64(&self.w[1][0]), to_f64(&self.w[1][1])],
        ]
    }
}

pub fn endpoint_matrix(k: usize, lambda: &Rational) -> Result<PathEndpointMatrix, GraphError> {
    if k < 4 {
        return Err(GraphError::PathTooShort(k));
    }
    let i = |j: usize| path_partition(j, lambda);
    let ik = i(k);
    let off = lambda * i(k - 3) / &ik;
    Ok(PathEndpointMatrix {
        k,
        lambda: lambda.clone(),
        w: [
            [i(k - 2) / &ik, off.clone()],
            [off, lambda * lambda * i(k - 4) / &ik],
        ],
    })
}

/// `det W'_k = I_{k-2}·I_{k-4} − I_{k-3}²`.
pub fn det_w_prime(k: usize, lambda: &Rational) -> Result<Rational, GraphError> {
    if k < 4 {
        return Err(GraphError::PathTooShort(k));
    }
    let i = |j: usize| path_partition(j, lambda);
    Ok(i(k - 2) * i(k - 4) - i(k - 3) * i(k - 3))
}

/// Decay rate of `|det W_k|` in `k`: `2λ / (2λ + √(4λ+1) + 1)`.
pub fn alpha(lambda: f64) -> f64 {
    assert!(lambda > 0.0, "alpha needs a positive fugacity");
    2.0 * lambda / (2.0 * lambda + (4.0 * lambda + 1.0).sqrt() + 1.0)
}

/// Endpoint occupancy counts per trial, indexed by (left, right) endpoint state.
type EndpointCounts = [[u64; 2]; 2];

/// One trial of the disjoint-paths experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub n: usize,
    pub path_len: usize,
    pub lambda: f64,
    pub trial: usize,
    pub rounds: u64,
    pub resamples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointPathsReport {
    pub n: usize,
    pub path_len: usize,
    #[serde(with = "crate::exact::as_string")]
    pub lambda: Rational,
    pub trials: usize,
    pub mean_rounds: f64,
    pub p50_rounds: u64,
    pub p90_rounds: u64,
    pub p99_rounds: u64,
    pub max_rounds: u64,
    pub mean_resamples: f64,
    /// Pooled endpoint frequencies over all paths of all trials.
    pub endpoint_freq: [[f64; 2]; 2],
    /// Binomial standard error of each pooled frequency under the exact law.
    pub endpoint_se: [[f64; 2]; 2],
    /// Exact `W_L` when `L >= 4`.
    pub exact: Option<[[f64; 2]; 2]>,
    /// Largest `|freq − exact| / se` over the four cells.
    pub max_z: Option<f64>,
    pub rows: Vec<TrialRow>,
}

impl DisjointPathsReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,L,lambda,trial,rounds,resamples\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n, r.path_len, r.lambda, r.trial, r.rounds, r.resamples
            ));
        }
        out
    }
}

fn percentile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let idx = ((sorted.len() as f64 - 1.0) * q).round() as usize;
    sorted[idx]
}

/// Runs [`hardcore_sample`] `trials` times on `n / path_len` disjoint paths.
/// Trial `t` uses seed `derive_seed(config.seed, t)`.
pub fn disjoint_paths_experiment(
    n: usize,
    path_len: usize,
    lambda: &Rational,
    trials: usize,
    config: &SamplerConfig,
) -> Result<DisjointPathsReport, GraphError> {
    if path_len == 0 || !n.is_multiple_of(path_len) {
        return Err(GraphError::PathLengthDoesNotDivide { n, len: path_len });
    }
    let count = n / path_len;
    let graph = Graph::disjoint_paths(count, path_len);
    let lambda_f = to_f64(lambda);
    let results: Vec<Result<(TrialRow, EndpointCounts), SamplerError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let cfg = config.with_seed(derive_seed(config.seed, t as u64));
            let (sample, stats) = hardcore_sample(&graph, lambda, &cfg)?;
            let mut counts = [[0u64; 2]; 2];
            for p in 0..count {
                let u = sample.occupied[p * path_len] as usize;
                let v = sample.occupied[(p + 1) * path_len - 1] as usize;
                counts[u][v] += 1;
            }
            let row = TrialRow {
                n,
                path_len,
                lambda: lambda_f,
                trial: t,
                rounds: stats.rounds,
                resamples: stats.total_resamples,
            };
            Ok((row, counts))
        })
        .collect();
    let mut rows = Vec::with_capacity(trials);
    let mut counts = [[0u64; 2]; 2];
    for r in results {
        let (row, c) = r?;
        rows.push(row);
        for i in 0..2 {
            for j in 0..2 {
                counts[i][j] += c[i][j];
            }
        }
    }
    let total = (trials * count).max(1) as f64;
    let freq = counts.map(|row| row.map(|c| c as f64 / total));
    let exact = if path_len >= 4 {
        Some(endpoint_matrix(path_len, lambda)?.to_f64())
    } else {
        None
    };
    let reference = exact.unwrap_or(freq);
    let se = reference.map(|row| row.map(|w| (w * (1.0 - w) / total).sqrt()));
    let max_z = exact.map(|ex| {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let diff = (freq[i][j] - ex[i][j]).abs();
                let z = if se[i][j] > 0.0 {
                    diff / se[i][j]
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(z);
            }
        }
        worst
    });
    let mut rounds: Vec<u64> = rows.iter().map(|r| r.rounds).collect();
    rounds.sort_unstable();
    let mean = |xs: &mut dyn Iterator<Item = u64>| {
        if trials == 0 {
            0.0
        } else {
            xs.map(|x| x as f64).sum::<f64>() / trials as f64
        }
    };
    Ok(DisjointPathsReport {
        n,
        path_len,
        lambda: lambda.clone(),
        trials,
        mean_rounds: mean(&mut rows.iter().map(|r| r.rounds)),
        p50_rounds: percentile(&rounds, 0.5),
        p90_rounds: percentile(&rounds, 0.9),
        p99_rounds: percentile(&rounds, 0.99),
        max_rounds: rounds.last().copied().unwrap_or(0),
        mean_resamples: mean(&mut rows.iter().map(|r| r.resamples)),
        endpoint_freq: freq,
        endpoint_se: se,
        exact,
        max_z,
        rows,
    })
}

/// `true` when every entry of the matrix is a probability.
pub fn is_stochastic(m: &PathEndpointMatrix) -> bool {
    m.w.iter().flatten().all(|w| *w >= Rational::zero()) && m.sum() == Rational::one()
}
