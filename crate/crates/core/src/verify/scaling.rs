use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::exact::{as_string, e_bounds, int, pow2, to_f64, Rational};
use crate::graph::{hardcore_condition, hardcore_trace, sink_popping, Graph};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sampler::SamplerConfig;

/// Application whose round count is measured on random regular graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingApp {
    /// Hard-core model; the events are the edges.
    Hardcore {
        d: usize,
        #[serde(with = "as_string")]
        lambda: Rational,
    },
    /// Sink-free orientations; the events are the vertices.
    SinkFree { d: usize },
}

impl ScalingApp {
    pub fn degree(&self) -> usize {
        match self {
            ScalingApp::Hardcore { d, .. } | ScalingApp::SinkFree { d } => *d,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScalingApp::Hardcore { .. } => "hardcore",
            ScalingApp::SinkFree { .. } => "sink_free",
        }
    }

    /// Number of vertices giving `m` events.
    fn vertices_for(&self, m: usize) -> usize {
        match self {
            ScalingApp::Hardcore { d, .. } => 2 * m / d,
            ScalingApp::SinkFree { .. } => m,
        }
    }

    /// Probability of a single event.
    pub fn event_probability(&self) -> Rational {
        match self {
            ScalingApp::Hardcore { lambda, .. } => {
                let q = lambda / (Rational::one() + lambda);
                &q * &q
            }
            ScalingApp::SinkFree { d } => pow2(-(*d as i64)),
        }
    }

    /// Whether the parameters are inside the regime where the round bound
    /// is proved: `λ <= 1/(2√e·d − 1)` for hard-core, and `e·p·(d+1) <= 1`
    /// for sink-free orientations (certified).
    pub fn condition_ok(&self) -> bool {
        match self {
            ScalingApp::Hardcore { d, lambda } => hardcore_condition(lambda, *d),
            ScalingApp::SinkFree { d } => {
                let (_, e_hi) = e_bounds();
                e_hi * self.event_probability() * int(*d as i64 + 1) <= int(1)
            }
        }
    }

    /// `(4e·d² − 1)·p`, the contraction factor of bad edges per round
    /// (hard-core only).
    pub fn decay_bound(&self) -> Option<f64> {
        match self {
            ScalingApp::Hardcore { d, .. } => {
                let d = *d as f64;
                Some((4.0 * std::f64::consts::E * d * d - 1.0) * to_f64(&self.event_probability()))
            }
            ScalingApp::SinkFree { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub seed: u64,
    pub trials: usize,
    /// Target event counts.
    pub sizes: Vec<usize>,
    pub round_cap: Option<u64>,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            seed: 0,
            trials: 200,
            sizes: (7..=14).map(|k| 3usize << k).collect(),
            round_cap: Some(crate::sampler::DEFAULT_ROUND_CAP),
        }
    }
}

/// One sampler run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub m: usize,
    pub n: usize,
    pub trial: usize,
    pub rounds: u64,
    pub resamples: u64,
    /// Bad events before each round (hard-core only), ending in 0.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub bad_trace: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRow {
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub mean_rounds: f64,
    pub se_rounds: f64,
    pub mean_resamples_per_m: f64,
    pub max_resamples_per_m: f64,
    /// Pooled ratio `Σ Bad_{t+1} / Σ Bad_t` over rounds with `Bad_t > 0`.
    pub decay_factor: Option<f64>,
    pub decay_se: Option<f64>,
}

/// Least-squares fit of mean rounds against `ln m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
    /// Coefficient of `(ln m)²` in a quadratic fit.
    pub curvature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub app: ScalingApp,
    pub condition_ok: bool,
    #[serde(with = "as_string")]
    pub event_probability: Rational,
    pub decay_bound: Option<f64>,
    pub rows: Vec<SizeRow>,
    pub fit: LogFit,
    /// Curvature of the quadratic fit adds more than one round across the
    /// measured range.
    pub super_logarithmic: bool,
    /// Mean rounds never drop by more than 3 combined standard errors from
    /// one size to the next.
    pub monotone_rounds: bool,
    pub trials: Vec<TrialRecord>,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("app,m,n,trial,rounds,resamples\n");
        for t in &self.trials {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.app.name(),
                t.m,
                t.n,
                t.trial,
                t.rounds,
                t.resamples
            ));
        }
        out
    }

    /// One line per size.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "m,n,trials,mean_rounds,se_rounds,mean_resamples_per_m,max_resamples_per_m,decay_factor,decay_se\n",
        );
        let opt = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v:.6}"));
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.6},{:.6},{:.6},{:.6},{},{}\n",
                r.m,
                r.n,
                r.trials,
                r.mean_rounds,
                r.se_rounds,
                r.mean_resamples_per_m,
                r.max_resamples_per_m,
                opt(r.decay_factor),
                opt(r.decay_se)
            ));
        }
        out
    }

    /// Every size's decay factor is within `bound + 3σ`.
    pub fn decay_within_bound(&self) -> Option<bool> {
        let bound = self.decay_bound?;
        Some(
            self.rows
                .iter()
                .all(|r| match (r.decay_factor, r.decay_se) {
                    (Some(f), Some(se)) => f <= bound + 3.0 * se,
                    _ => true,
                }),
        )
    }
}

fn solve3(mut a: [[f64; 4]; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("rows");
        a.swap(col, pivot);
        for row in 0..3 {
            if row != col && a[col][col] != 0.0 {
                let f = a[row][col] / a[col][col];
                let pivot_row = a[col];
                for (x, y) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * y;
                }
            }
        }
    }
    [a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]]
}

/// Fits `y = a + b·x` and the curvature of `y = a + b·x + c·x²`.
pub fn log_fit(ms: &[usize], ys: &[f64]) -> LogFit {
    let xs: Vec<f64> = ms.iter().map(|&m| (m as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let residuals: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - (a + b * x)).collect();
    let max_abs_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let curvature = if xs.len() >= 3 {
        let s = |p: i32| xs.iter().map(|x| x.powi(p)).sum::<f64>();
        let t = |p: i32| xs.iter().zip(ys).map(|(x, y)| x.powi(p) * y).sum::<f64>();
        solve3([
            [n, s(1), s(2), t(0)],
            [s(1), s(2), s(3), t(1)],
            [s(2), s(3), s(4), t(2)],
        ])[2]
    } else {
        0.0
    };
    LogFit {
        a,
        b,
        residuals,
        max_abs_residual,
        curvature,
    }
}

fn run_trial(
    app: &ScalingApp,
    m: usize,
    trial_seed: u64,
    cap: Option<u64>,
) -> Result<TrialRecord, VerifyError> {
    let d = app.degree();
    let n = app.vertices_for(m);
    let mut graph_rng = rng_from_seed(derive_seed(trial_seed, 1));
    let graph = Graph::random_regular(n, d, &mut graph_rng)?;
    let cfg = SamplerConfig::default()
        .with_seed(derive_seed(trial_seed, 0))
        .with_round_cap(cap);
    let (rounds, resamples, bad_trace) = match app {
        ScalingApp::Hardcore { lambda, .. } => {
            let run = hardcore_trace(&graph, lambda, &cfg)?;
            (run.stats.rounds, run.stats.total_resamples, run.bad_edges)
        }
        ScalingApp::SinkFree { .. } => {
            let (_, stats) = sink_popping(&graph, &cfg)?;
            (stats.rounds, stats.total_resamples, Vec::new())
        }
    };
    Ok(TrialRecord {
        m: if matches!(app, ScalingApp::Hardcore { .. }) {
            graph.edge_count()
        } else {
            n
        },
        n,
        trial: 0,
        rounds,
        resamples,
        bad_trace,
    })
}

fn summarize(records: &[TrialRecord]) -> SizeRow {
    let t = records.len() as f64;
    let rounds: Vec<f64> = records.iter().map(|r| r.rounds as f64).collect();
    let mean = rounds.iter().sum::<f64>() / t;
    let var = if records.len() > 1 {
        rounds.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0)
    } else {
        0.0
    };
    let m = records[0].m;
    let per_m: Vec<f64> = records
        .iter()
        .map(|r| r.resamples as f64 / m as f64)
        .collect();
    let has_trace = records.iter().any(|r| !r.bad_trace.is_empty());
    let (decay_factor, decay_se) = if has_trace {
        // per-trial sums of Bad_t and Bad_{t+1} over rounds with Bad_t > 0
        let pairs: Vec<(f64, f64)> = records
            .iter()
            .map(|r| {
                r.bad_trace
                    .windows(2)
                    .fold((0.0, 0.0), |(x, y), w| (x + w[0] as f64, y + w[1] as f64))
            })
            .collect();
        let sx: f64 = pairs.iter().map(|p| p.0).sum();
        let sy: f64 = pairs.iter().map(|p| p.1).sum();
        if sx > 0.0 {
            let ratio = sy / sx;
            let xbar = sx / t;
            let s2 = pairs
                .iter()
                .map(|(x, y)| (y - ratio * x).powi(2))
                .sum::<f64>()
                / (t - 1.0).max(1.0);
            (Some(ratio), Some((s2 / t).sqrt() / xbar))
        } else {
            (None, None)
        }
    } else {
        (None, None)
    };
    SizeRow {
        m,
        n: records[0].n,
        trials: records.len(),
        mean_rounds: mean,
        se_rounds: (var / t).sqrt(),
        mean_resamples_per_m: per_m.iter().sum::<f64>() / t,
        max_resamples_per_m: per_m.iter().fold(0.0, |a: f64, &b| a.max(b)),
        decay_factor,
        decay_se,
    }
}

/// Runs `config.trials` independent (graph, sampler) pairs per size and
/// fits mean rounds against `ln m`.
pub fn round_scaling_experiment(
    app: &ScalingApp,
    config: &ScalingConfig,
) -> Result<ScalingReport, VerifyError> {
    let mut rows = Vec::new();
    let mut all = Vec::new();
    for (si, &m) in config.sizes.iter().enumerate() {
        let size_seed = derive_seed(config.seed, si as u64);
        let mut records = (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(app, m, derive_seed(size_seed, t as u64), config.round_cap))
            .collect::<Result<Vec<_>, _>>()?;
        for (t, r) in records.iter_mut().enumerate() {
            r.trial = t;
        }
        rows.push(summarize(&records));
        all.extend(records);
    }
    let ms: Vec<usize> = rows.iter().map(|r| r.m).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_rounds).collect();
    let fit = log_fit(&ms, &ys);
    let span = match (ms.first(), ms.last()) {
        (Some(&lo), Some(&hi)) => (hi as f64).ln() - (lo as f64).ln(),
        _ => 0.0,
    };
    let super_logarithmic = fit.curvature * span * span > 1.0;
    let monotone_rounds = rows.windows(2).all(|w| {
        let se = (w[0].se_rounds.powi(2) + w[1].se_rounds.powi(2)).sqrt();
        w[1].mean_rounds >= w[0].mean_rounds - 3.0 * se
    });
    Ok(ScalingReport {
        app: app.clone(),
        condition_ok: app.condition_ok(),
        event_probability: app.event_probability(),
        decay_bound: app.decay_bound(),
        rows,
        fit,
        super_logarithmic,
        monotone_rounds,
        trials: all,
    })
}
