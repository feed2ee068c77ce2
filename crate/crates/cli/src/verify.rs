use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use prs_core::exact::ratio;
use prs_core::graph::encode::sink_free_instance;
use prs_core::graph::Graph;
use prs_core::verify::{
    expected_resamples_test, first_round_test, res_set_property_tests, run_preset,
    truncated_sum_convergence_test, two_adjacent_events, InstanceFamily, RandomCnfParams,
    RandomInstanceParams, PRESETS,
};
use prs_core::{DependencyGraph, Instance, SamplerConfig};
use serde_json::{json, Value};

use crate::output::{artifact, to_json};
use crate::{EXIT_OK, EXIT_VERIFY};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(subcommand)]
    suite: Suite,

    /// Directory for the JSON report.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Suite {
    /// Compare sampled outcomes with exhaustive enumeration (TV distance and chi-square).
    Uniformity {
        /// Preset to run; all presets when omitted.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// A deliberately biased sampler must fail the uniformity thresholds.
    NegativeControl {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Mean resampled events against the exact expectation.
    ExpectedWork {
        #[arg(long, default_value_t = 100_000)]
        runs: usize,
    },
    /// Law of the set of events occurring in the first round.
    FirstRound {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Containment, unblocking and stability of the resampling set.
    ResProps {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Truncated sums over independent set sequences approach 1/q_empty.
    Truncated {
        #[arg(long, default_value_t = 60)]
        max_len: usize,
    },
    /// Every suite above with its default size.
    All,
}

struct Verdicts {
    lines: Vec<(bool, String)>,
    reports: Vec<(String, Value)>,
}

impl Verdicts {
    fn new() -> Self {
        Verdicts {
            lines: Vec::new(),
            reports: Vec::new(),
        }
    }

    fn add(&mut self, pass: bool, name: &str, detail: String, report: Value) {
        self.lines.push((pass, format!("{name}: {detail}")));
        self.reports.push((name.to_string(), report));
    }
}

fn uniformity(v: &mut Verdicts, preset: Option<&str>, samples: usize, seed: u64) -> Result<()> {
    let chosen: Vec<_> = match preset {
        Some(name) => match PRESETS.iter().find(|p| p.name == name) {
            Some(p) => vec![*p],
            None => {
                let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
                bail!("unknown preset {name:?}; available: {}", names.join(", "));
            }
        },
        None => PRESETS.to_vec(),
    };
    for p in chosen {
        let verdict = run_preset(p.name, samples, seed)?;
        let pass = verdict.pass == p.expect_pass;
        let expectation = if p.expect_pass {
            ""
        } else {
            " (expected to fail)"
        };
        v.add(
            pass,
            &format!("uniformity/{}", p.name),
            format!(
                "N {} tv {:.5} (<= {}) p {:.4} (>= {}) sampler {}{expectation}",
                verdict.samples,
                verdict.tv,
                verdict.tv_threshold,
                verdict.p_value,
                verdict.p_threshold,
                verdict.sampler
            ),
            serde_json::to_value(&verdict)?,
        );
    }
    Ok(())
}

fn expected_work(v: &mut Verdicts, runs: usize, seed: u64) -> Result<()> {
    let cases: [(&str, Instance); 2] = [
        ("two-adjacent-events", two_adjacent_events()),
        ("c3-sink", sink_free_instance(&Graph::cycle(3))),
    ];
    for (name, instance) in cases {
        let r =
            expected_resamples_test(&instance, runs, &SamplerConfig::default().with_seed(seed))?;
        v.add(
            r.pass,
            &format!("expected-work/{name}"),
            format!(
                "N {} mean {:.4} exact {} z {:.2}",
                r.runs, r.mean, r.exact, r.z
            ),
            serde_json::to_value(&r)?,
        );
    }
    Ok(())
}

fn first_round(v: &mut Verdicts, samples: usize, seed: u64) -> Result<()> {
    let cases: [(&str, Instance); 2] = [
        ("two-adjacent-events", two_adjacent_events()),
        ("c3-sink", sink_free_instance(&Graph::cycle(3))),
    ];
    for (name, instance) in cases {
        let r = first_round_test(
            &instance,
            samples,
            &SamplerConfig::default().with_seed(seed),
        )?;
        let worst = r.rows.iter().fold(0.0f64, |m, row| m.max(row.z.abs()));
        v.add(
            r.pass,
            &format!("first-round/{name}"),
            format!(
                "N {} sets {} max |z| {worst:.2} (<= 3)",
                r.samples,
                r.rows.len()
            ),
            serde_json::to_value(&r)?,
        );
    }
    Ok(())
}

fn res_props(v: &mut Verdicts, trials: usize, seed: u64) -> Result<()> {
    let families = [
        ("cnf", InstanceFamily::Cnf(RandomCnfParams::default())),
        (
            "general",
            InstanceFamily::General(RandomInstanceParams::default()),
        ),
        (
            "extremal",
            InstanceFamily::Extremal(RandomInstanceParams::default()),
        ),
    ];
    for (name, family) in families {
        let r = res_set_property_tests(family, trials, seed);
        v.add(
            r.violations() == 0,
            &format!("res-props/{name}"),
            format!(
                "trials {} violations {} (stability checked {}, skipped {}) extremal trials {}",
                r.trials,
                r.violations(),
                r.stability_checked,
                r.stability_skipped,
                r.extremal_trials
            ),
            serde_json::to_value(&r)?,
        );
    }
    Ok(())
}

fn truncated(v: &mut Verdicts, max_len: usize) -> Result<()> {
    let cases = [
        (
            "single-event",
            DependencyGraph::from_edges(1, &[]),
            vec![ratio(1, 2)],
        ),
        (
            "two-adjacent-events",
            DependencyGraph::from_edges(2, &[(0, 1)]),
            vec![ratio(1, 4), ratio(1, 4)],
        ),
    ];
    for (name, graph, p) in cases {
        let r = truncated_sum_convergence_test(&graph, &p, max_len)?;
        v.add(
            r.pass,
            &format!("truncated/{name}"),
            format!(
                "L {} target {} gap {:.3e} (<= {:.3e}) monotone {}",
                r.max_len, r.target, r.gap_f64, r.tail_bound_f64, r.monotone
            ),
            serde_json::to_value(&r)?,
        );
    }
    Ok(())
}

pub fn run(args: &VerifyArgs, seed: u64) -> Result<u8> {
    let mut v = Verdicts::new();
    match &args.suite {
        Suite::Uniformity { preset, samples } => {
            uniformity(&mut v, preset.as_deref(), *samples, seed)?
        }
        Suite::NegativeControl { samples } => {
            uniformity(&mut v, Some("negative-control"), *samples, seed)?
        }
        Suite::ExpectedWork { runs } => expected_work(&mut v, *runs, seed)?,
        Suite::FirstRound { samples } => first_round(&mut v, *samples, seed)?,
        Suite::ResProps { trials } => res_props(&mut v, *trials, seed)?,
        Suite::Truncated { max_len } => truncated(&mut v, *max_len)?,
        Suite::All => {
            uniformity(&mut v, None, 100_000, seed)?;
            expected_work(&mut v, 100_000, seed)?;
            first_round(&mut v, 100_000, seed)?;
            res_props(&mut v, 10_000, seed)?;
            truncated(&mut v, 60)?;
        }
    }
    let failed = v.lines.iter().filter(|(pass, _)| !pass).count();
    for (pass, line) in &v.lines {
        println!("{} {line}", if *pass { "PASS" } else { "FAIL" });
    }
    println!(
        "seed {seed}: {} passed, {failed} failed",
        v.lines.len() - failed
    );
    if let Some(dir) = &args.out_dir {
        let report: serde_json::Map<String, Value> = v.reports.into_iter().collect();
        let path = artifact(
            dir,
            "verify.json",
            &to_json(&json!({ "seed": seed, "reports": report }))?,
        )?;
        eprintln!("wrote {}", path.display());
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY })
}
