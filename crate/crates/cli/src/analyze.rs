use anyhow::{bail, Context, Result};
use clap::Args;
use prs_core::cnf::{
    check_extremal_condition, cnf_stats, sharing_verdict, CnfStats, SharingVerdict, Width,
};
use prs_core::graph::hardcore_condition;
use prs_core::shearer::{shearer_report, ShearerReport, MAX_EVENTS};
use serde::Serialize;

use crate::input::{load, GraphApp, Input, InputArgs};
use crate::output::{emit, to_json};
use crate::EXIT_OK;

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Clause width, for a parameter-only check of the CNF conditions.
    #[arg(long, requires = "d", conflicts_with = "source")]
    k: Option<usize>,

    /// Maximum number of clauses sharing a variable.
    #[arg(long, requires = "k")]
    d: Option<usize>,

    /// Minimum number of variables shared by two dependent clauses.
    #[arg(long, requires = "k")]
    s: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Conditions {
    k: usize,
    d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<usize>,
    /// `(d − 1)·e·k <= 2^k`, for extremal formulas.
    extremal_condition: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    sharing: Option<SharingReport>,
}

#[derive(Debug, Serialize)]
struct SharingReport {
    #[serde(flatten)]
    verdict: SharingVerdict,
    holds: bool,
}

#[derive(Debug, Serialize)]
struct Analysis {
    variables: usize,
    events: usize,
    extremal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hardcore_condition: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cnf: Option<CnfStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditions: Option<Conditions>,
    shearer: ShearerReport,
}

fn conditions(k: usize, d: usize, s: Option<usize>) -> Conditions {
    let sharing = s.filter(|_| d >= 3).map(|s| {
        let verdict = sharing_verdict(k, d, s);
        SharingReport {
            holds: verdict.holds(),
            verdict,
        }
    });
    Conditions {
        k,
        d,
        s,
        extremal_condition: check_extremal_condition(k, d),
        sharing,
    }
}

pub fn run(args: &AnalyzeArgs) -> Result<u8> {
    if let (Some(k), Some(d)) = (args.k, args.d) {
        emit(None, &to_json(&conditions(k, d, args.s))?)?;
        return Ok(EXIT_OK);
    }
    if !args.input.has_source() {
        bail!("give one of --instance, --cnf, --graph, or --k/--d/--s");
    }
    let input = load(&args.input)?;
    let instance = input.to_instance()?;
    if instance.num_events() > MAX_EVENTS {
        bail!(
            "exact analysis enumerates subsets of events and supports at most {MAX_EVENTS}; this input has {} events. \
             Use a smaller instance, or check the CNF conditions from parameters with --k/--d/--s",
            instance.num_events()
        );
    }
    let shearer = shearer_report(&instance).context("exact analysis")?;
    let (cnf, conds) = match &input {
        Input::Cnf(f) => {
            let stats = cnf_stats(f);
            let conds = match stats.width {
                Width::Uniform(k) => Some(conditions(k, stats.degree, stats.intersection)),
                Width::Mixed => None,
            };
            (Some(stats), conds)
        }
        _ => (None, None),
    };
    let (model, hardcore) = match &input {
        Input::Graph { graph, app, .. } => (
            Some(app.name()),
            match app {
                GraphApp::Hardcore { lambda } => {
                    Some(hardcore_condition(lambda, graph.max_degree()))
                }
                _ => None,
            },
        ),
        _ => (None, None),
    };
    let analysis = Analysis {
        variables: instance.num_vars(),
        events: instance.num_events(),
        extremal: instance.is_extremal()?,
        model,
        hardcore_condition: hardcore,
        cnf,
        conditions: conds,
        shearer,
    };
    emit(None, &to_json(&analysis)?)?;
    Ok(EXIT_OK)
}
