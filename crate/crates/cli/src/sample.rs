use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use prs_core::cnf::{format_literals, sample_cnf};
use prs_core::graph::encode::{values_to_arrows, values_to_hardcore, values_to_orientation};
use prs_core::graph::{
    cycle_popping, hardcore_sample, sink_popping, ArrowMap, Graph, HardcoreConfig, Orientation,
};
use prs_core::rng::derive_seed;
use prs_core::sampler::{self, DEFAULT_ROUND_CAP};
use prs_core::{RunStats, SamplerConfig, SamplerKind};
use serde::Serialize;

use crate::input::{load, GraphApp, Input, InputArgs};
use crate::output::{emit, to_json, Format};
use crate::EXIT_OK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerChoice {
    /// Specialised sampler for graph models, general otherwise.
    Auto,
    MoserTardos,
    Extremal,
    General,
    /// Sink popping, cycle popping, or the hard-core sampler.
    Specialised,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    input: InputArgs,

    #[arg(long, value_enum, default_value_t = SamplerChoice::Auto)]
    sampler: SamplerChoice,

    /// Number of samples; sample `i` uses a seed derived from the base seed and `i`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,

    /// Maximum rounds per sample; 0 removes the cap.
    #[arg(long, default_value_t = DEFAULT_ROUND_CAP)]
    round_cap: u64,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Summary {
    seed: u64,
    sampler: String,
    count: u64,
    total_rounds: u64,
    mean_rounds: f64,
    max_rounds: u64,
    total_resampled_events: u64,
    mean_resampled_events: f64,
    total_resampled_variables: u64,
}

#[derive(Debug, Serialize)]
struct JsonOutput<'a> {
    seed: u64,
    sampler: &'a str,
    samples: Vec<String>,
    values: Vec<Vec<u32>>,
    stats: Summary,
}

fn sink_line(graph: &Graph, labels: &[u64], o: &Orientation) -> String {
    (0..graph.edge_count())
        .map(|e| format!("{}->{}", labels[o.tail(graph, e)], labels[o.head(graph, e)]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn tree_line(labels: &[u64], arrows: &ArrowMap) -> String {
    arrows
        .successor
        .iter()
        .map(|s| s.map_or_else(|| "-1".to_string(), |p| labels[p].to_string()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn hardcore_line(config: &HardcoreConfig) -> String {
    config.to_bits()
}

fn values_line(values: &[u32]) -> String {
    values
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn kind_of(choice: SamplerChoice) -> SamplerKind {
    match choice {
        SamplerChoice::MoserTardos => SamplerKind::MoserTardos,
        SamplerChoice::Extremal => SamplerKind::ExtremalPrs,
        _ => SamplerKind::GeneralPrs,
    }
}

pub fn run(args: &SampleArgs, seed: u64) -> Result<u8> {
    let input = load(&args.input)?;
    let is_graph = matches!(input, Input::Graph { .. });
    let choice = match args.sampler {
        SamplerChoice::Auto if is_graph => SamplerChoice::Specialised,
        SamplerChoice::Auto => SamplerChoice::General,
        SamplerChoice::Specialised if !is_graph => bail!("--sampler specialised needs --graph"),
        other => other,
    };
    let cap = (args.round_cap > 0).then_some(args.round_cap);
    let base = SamplerConfig::new(kind_of(choice), seed).with_round_cap(cap);
    let encoded = match (&input, choice) {
        (Input::Graph { .. }, SamplerChoice::Specialised) | (Input::Cnf(_), _) => None,
        _ => Some(input.to_instance()?),
    };
    let sampler_name = match (&input, choice) {
        (
            Input::Graph {
                app: GraphApp::SinkFree,
                ..
            },
            SamplerChoice::Specialised,
        ) => "sink_popping",
        (
            Input::Graph {
                app: GraphApp::SpanningTree { .. },
                ..
            },
            SamplerChoice::Specialised,
        ) => "cycle_popping",
        (
            Input::Graph {
                app: GraphApp::Hardcore { .. },
                ..
            },
            SamplerChoice::Specialised,
        ) => "hardcore_prs",
        _ => base.kind.name(),
    };

    let mut lines = Vec::new();
    let mut all_values = Vec::new();
    let mut stats: Vec<RunStats> = Vec::new();
    for i in 0..args.count {
        let config = base.with_seed(derive_seed(seed, i));
        let (values, line, s) = match (&input, &encoded) {
            (Input::Cnf(formula), _) => {
                let (solution, s) = sample_cnf(formula, config.kind, &config)?;
                let values = solution.iter().map(|&b| b as u32).collect();
                (values, format_literals(&solution), s)
            }
            (Input::Graph { graph, labels, app }, None) => match app {
                GraphApp::SinkFree => {
                    let (o, s) = sink_popping(graph, &config)?;
                    (o.values.clone(), sink_line(graph, labels, &o), s)
                }
                GraphApp::SpanningTree { root } => {
                    let (a, s) = cycle_popping(graph, *root, &config)?;
                    let values = prs_core::graph::encode::arrows_to_values(graph, &a);
                    (values, tree_line(labels, &a), s)
                }
                GraphApp::Hardcore { lambda } => {
                    let (c, s) = hardcore_sample(graph, lambda, &config)?;
                    (
                        prs_core::graph::encode::hardcore_to_values(&c),
                        hardcore_line(&c),
                        s,
                    )
                }
            },
            (_, Some(instance)) => {
                let (a, s) = sampler::run(instance, &config)?;
                let values = a.to_values().expect("sampler returns a total assignment");
                let line = match &input {
                    Input::Graph { graph, labels, app } => match app {
                        GraphApp::SinkFree => {
                            sink_line(graph, labels, &values_to_orientation(&values))
                        }
                        GraphApp::SpanningTree { root } => {
                            tree_line(labels, &values_to_arrows(graph, *root, &values))
                        }
                        GraphApp::Hardcore { .. } => hardcore_line(&values_to_hardcore(&values)),
                    },
                    _ => values_line(&values),
                };
                (values, line, s)
            }
            (Input::Instance(_), None) => unreachable!("instances are always encoded"),
        };
        lines.push(line);
        all_values.push(values);
        stats.push(s);
    }

    let n = args.count as f64;
    let total_rounds: u64 = stats.iter().map(|s| s.rounds).sum();
    let total_events: u64 = stats.iter().map(|s| s.total_resamples).sum();
    let summary = Summary {
        seed,
        sampler: sampler_name.to_string(),
        count: args.count,
        total_rounds,
        mean_rounds: total_rounds as f64 / n,
        max_rounds: stats.iter().map(|s| s.rounds).max().unwrap_or(0),
        total_resampled_events: total_events,
        mean_resampled_events: total_events as f64 / n,
        total_resampled_variables: stats.iter().map(|s| s.variable_resamples).sum(),
    };
    let text = match args.format {
        Format::Json => to_json(&JsonOutput {
            seed,
            sampler: sampler_name,
            samples: lines,
            values: all_values,
            stats: summary,
        })?,
        Format::Text => {
            let mut out = format!(
                "# seed {seed} sampler {sampler_name} count {}\n",
                args.count
            );
            for line in &lines {
                out.push_str(line);
                out.push('\n');
            }
            writeln!(
                out,
                "{}",
                serde_json::to_string(&serde_json::json!({ "stats": summary }))?
            )?;
            out
        }
    };
    emit(args.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}
