use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::exact::{ratio, to_f64};
use crate::model::{EventSpec, Instance, VariableSpec};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sampler::{self, SamplerConfig, SamplerKind};
use crate::shearer::{all_q_values, expected_resamples, per_event_expectations};

/// Two events on one four-valued variable, `{X = 0}` and `{X = 1}`: they
/// are adjacent, disjoint, and each has probability 1/4.
pub fn two_adjacent_events() -> Instance {
    Instance::new(
        vec![VariableSpec::new(0, vec![ratio(1, 4); 4])],
        vec![
            EventSpec::single(0, &[(0, 0)]).expect("valid"),
            EventSpec::single(1, &[(0, 1)]).expect("valid"),
        ],
    )
    .expect("valid instance")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerEventRow {
    pub event: usize,
    pub exact: f64,
    pub mean: f64,
    pub se: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationReport {
    pub runs: usize,
    /// Exact `E[T]` as a rational string.
    pub exact: String,
    pub exact_f64: f64,
    pub mean: f64,
    pub se: f64,
    pub z: f64,
    pub per_event: Vec<PerEventRow>,
    /// Every `|z| <= 3`.
    pub pass: bool,
}

fn z_score(mean: f64, exact: f64, se: f64) -> f64 {
    let diff = mean - exact;
    if se > 0.0 {
        diff / se
    } else if diff.abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY * diff.signum()
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs partial rejection sampling `runs` times and compares the mean
/// number of resampled events, in total and per event, with the exact
/// values `Σ q_i / q_∅` and `q_i / q_∅`.
pub fn expected_resamples_test(
    instance: &Instance,
    runs: usize,
    config: &SamplerConfig,
) -> Result<ExpectationReport, VerifyError> {
    if !instance.is_extremal()? {
        return Err(VerifyError::NotExtremal);
    }
    let graph = instance.dependency_graph();
    let p = instance.probabilities();
    let exact_total = expected_resamples(graph, &p)?;
    let exact_each = per_event_expectations(graph, &p)?;
    let stats = (0..runs)
        .into_par_iter()
        .map(|i| {
            let cfg = SamplerConfig {
                kind: SamplerKind::ExtremalPrs,
                seed: derive_seed(config.seed, i as u64),
                record_log: false,
                ..config.clone()
            };
            sampler::run(instance, &cfg).map(|(_, s)| s)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let totals: Vec<f64> = stats.iter().map(|s| s.total_resamples as f64).collect();
    let (mean, se) = mean_and_se(&totals);
    let exact_f = to_f64(&exact_total);
    let z = z_score(mean, exact_f, se);
    let per_event: Vec<PerEventRow> = exact_each
        .iter()
        .enumerate()
        .map(|(i, ex)| {
            let xs: Vec<f64> = stats.iter().map(|s| s.per_event[i] as f64).collect();
            let (m, s) = mean_and_se(&xs);
            let exact = to_f64(ex);
            PerEventRow {
                event: i,
                exact,
                mean: m,
                se: s,
                z: z_score(m, exact, s),
            }
        })
        .collect();
    let pass = z.abs() <= 3.0 && per_event.iter().all(|r| r.z.abs() <= 3.0);
    Ok(ExpectationReport {
        runs,
        exact: exact_total.to_string(),
        exact_f64: exact_f,
        mean,
        se,
        z,
        per_event,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstRoundRow {
    pub set: Vec<usize>,
    pub q: String,
    pub q_f64: f64,
    pub freq: f64,
    pub sigma: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstRoundReport {
    pub samples: usize,
    pub rows: Vec<FirstRoundRow>,
    /// Draws whose occurring set was not independent.
    pub dependent_sets: usize,
    /// Every row within 3σ and no dependent occurring set.
    pub pass: bool,
}

/// Tallies the exact set of occurring events under the initial product
/// draw (the same draw a sampler seeded with `derive_seed(seed, i)` makes)
/// and compares each frequency with `q_I`.
pub fn first_round_test(
    instance: &Instance,
    samples: usize,
    config: &SamplerConfig,
) -> Result<FirstRoundReport, VerifyError> {
    if !instance.is_extremal()? {
        return Err(VerifyError::NotExtremal);
    }
    let graph = instance.dependency_graph();
    let q = all_q_values(graph, &instance.probabilities())?;
    let counts = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(config.seed, i as u64));
            let values = instance.sample_values(&mut rng);
            let mut m = BTreeMap::new();
            m.insert(instance.bad_events(&values), 1u64);
            m
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let n = samples as f64;
    let mut seen = 0u64;
    let rows: Vec<FirstRoundRow> = q
        .iter()
        .map(|(set, qv)| {
            let c = counts.get(set).copied().unwrap_or(0);
            seen += c;
            let qf = to_f64(qv);
            let freq = c as f64 / n;
            let sigma = (qf * (1.0 - qf) / n).sqrt();
            FirstRoundRow {
                set: set.clone(),
                q: qv.to_string(),
                q_f64: qf,
                freq,
                sigma,
                z: z_score(freq, qf, sigma),
            }
        })
        .collect();
    let dependent_sets = (samples as u64 - seen) as usize;
    let pass = dependent_sets == 0 && rows.iter().all(|r| r.z.abs() <= 3.0);
    Ok(FirstRoundReport {
        samples,
        rows,
        dependent_sets,
        pass,
    })
}
