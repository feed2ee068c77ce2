mod analyze;
mod experiment;
mod input;
mod output;
mod sample;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prs_core::cnf::CnfError;
use prs_core::graph::GraphError;
use prs_core::sampler::SamplerError;
use prs_core::verify::VerifyError;

/// Exact samplers for constraint problems by partial rejection sampling.
///
/// Exit status: 0 success, 1 usage or input error, 2 round cap exceeded,
/// 3 verification failure.
#[derive(Debug, Parser)]
#[command(name = "prs", version, about, long_about)]
pub struct Cli {
    /// Base seed. Defaults to a fresh random value, which is printed so the
    /// run can be replayed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw exact samples from an instance, a CNF formula, or a graph model.
    Sample(sample::SampleArgs),
    /// Exact analysis: q values, expected work, and sufficient conditions.
    Analyze(analyze::AnalyzeArgs),
    /// Run a statistical or exact verification suite.
    Verify(verify::VerifyArgs),
    /// Run a simulation experiment and write CSV/JSON results.
    Experiment(experiment::ExperimentArgs),
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_CAP: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;

fn is_cap(e: &SamplerError) -> bool {
    matches!(e, SamplerError::RoundCapExceeded { .. })
}

fn graph_cap(e: &GraphError) -> bool {
    matches!(e, GraphError::Sampler(s) if is_cap(s))
}

/// Whether a failure was a sampler hitting its round cap.
fn cap_exceeded(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        cause.downcast_ref::<SamplerError>().is_some_and(is_cap)
            || cause.downcast_ref::<GraphError>().is_some_and(graph_cap)
            || matches!(cause.downcast_ref::<CnfError>(), Some(CnfError::Sampler(s)) if is_cap(s))
            || match cause.downcast_ref::<VerifyError>() {
                Some(VerifyError::Sampler(s)) => is_cap(s),
                Some(VerifyError::Graph(g)) => graph_cap(g),
                Some(VerifyError::Cnf(CnfError::Sampler(s))) => is_cap(s),
                _ => false,
            }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let seed = cli.seed.unwrap_or_else(rand::random);
    if !matches!(cli.command, Command::Analyze(_)) {
        eprintln!("seed: {seed}");
    }
    let result = match &cli.command {
        Command::Sample(args) => sample::run(args, seed),
        Command::Analyze(args) => analyze::run(args),
        Command::Verify(args) => verify::run(args, seed),
        Command::Experiment(args) => experiment::run(args, seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if cap_exceeded(&err) {
                EXIT_CAP
            } else {
                EXIT_INPUT
            })
        }
    }
}
