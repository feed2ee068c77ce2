use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Subcommand, ValueEnum};
use prs_core::graph::disjoint_paths_experiment;
use prs_core::sampler::DEFAULT_ROUND_CAP;
use prs_core::verify::{round_scaling_experiment, ScalingApp, ScalingConfig};
use prs_core::SamplerConfig;

use crate::input::parse_number;
use crate::output::{artifact, emit, to_json};
use crate::EXIT_OK;

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(subcommand)]
    experiment: Experiment,

    /// Directory for per-trial CSV and the JSON report.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Write the summary CSV here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScalingModel {
    Hardcore,
    SinkFree,
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// Mean rounds against the number of events on random regular graphs.
    RoundScaling {
        #[arg(long, value_enum, default_value_t = ScalingModel::Hardcore)]
        app: ScalingModel,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// Hard-core fugacity, as a decimal or `a/b`.
        #[arg(long, default_value = "0.1")]
        lambda: String,
        /// Independent (graph, run) pairs per size.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Event counts; defaults to 3·2^k for k = 7..=14.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_ROUND_CAP)]
        round_cap: u64,
    },
    /// Hard-core sampling on disjoint paths: rounds and endpoint frequencies.
    DisjointPaths {
        /// Total number of vertices.
        #[arg(long)]
        n: usize,
        /// Vertices per path; must divide n.
        #[arg(long = "len")]
        len: usize,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

pub fn run(args: &ExperimentArgs, seed: u64) -> Result<u8> {
    match &args.experiment {
        Experiment::RoundScaling {
            app,
            degree,
            lambda,
            trials,
            sizes,
            round_cap,
        } => {
            let app = match app {
                ScalingModel::Hardcore => ScalingApp::Hardcore {
                    d: *degree,
                    lambda: parse_number(lambda)?,
                },
                ScalingModel::SinkFree => ScalingApp::SinkFree { d: *degree },
            };
            let mut config = ScalingConfig {
                seed,
                trials: *trials,
                round_cap: (*round_cap > 0).then_some(*round_cap),
                ..ScalingConfig::default()
            };
            if !sizes.is_empty() {
                config.sizes = sizes.clone();
            }
            if *trials == 0 {
                bail!("--trials must be at least 1");
            }
            if !app.condition_ok() {
                eprintln!("warning: parameters are outside the regime where logarithmic rounds are proved");
            }
            let report = round_scaling_experiment(&app, &config)?;
            let fit = &report.fit;
            eprintln!(
                "fit: rounds = {:.4} + {:.4} ln m, max |residual| {:.4}, curvature {:.4}, super-logarithmic {}",
                fit.a, fit.b, fit.max_abs_residual, fit.curvature, report.super_logarithmic
            );
            if let Some(ok) = report.decay_within_bound() {
                eprintln!(
                    "decay bound {:.4}: {}",
                    report.decay_bound.unwrap_or(f64::NAN),
                    if ok { "respected" } else { "exceeded" }
                );
            }
            if let Some(dir) = &args.out_dir {
                artifact(dir, "round_scaling_trials.csv", &report.to_csv())?;
                artifact(dir, "round_scaling.json", &to_json(&report)?)?;
                eprintln!("wrote {}", dir.display());
            }
            emit(args.output.as_deref(), &report.summary_csv())?;
        }
        Experiment::DisjointPaths {
            n,
            len,
            lambda,
            trials,
        } => {
            let lambda = parse_number(lambda)?;
            let report = disjoint_paths_experiment(
                *n,
                *len,
                &lambda,
                *trials,
                &SamplerConfig::default().with_seed(seed),
            )?;
            eprintln!(
                "mean rounds {:.3} (p50 {}, p90 {}, p99 {}, max {}), endpoint max |z| {}",
                report.mean_rounds,
                report.p50_rounds,
                report.p90_rounds,
                report.p99_rounds,
                report.max_rounds,
                report
                    .max_z
                    .map_or_else(|| "n/a".to_string(), |z| format!("{z:.2}"))
            );
            if let Some(dir) = &args.out_dir {
                artifact(dir, "disjoint_paths.json", &to_json(&report)?)?;
                eprintln!("wrote {}", dir.display());
            }
            emit(args.output.as_deref(), &report.to_csv())?;
        }
    }
    Ok(EXIT_OK)
}
