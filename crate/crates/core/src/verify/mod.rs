//! Brute-force oracles and statistical checks of the samplers.
//!
//! Every statistical routine is deterministic given its seed: sample `i`
//! of a run uses `derive_seed(seed, i)`, and aggregation only sums counts.

mod expectations;
mod oracle;
mod presets;
mod random;
mod res_props;
mod scaling;
mod truncated;
mod uniformity;

use thiserror::Error;

use crate::cnf::CnfError;
use crate::graph::GraphError;
use crate::model::ModelError;
use crate::sampler::SamplerError;
use crate::shearer::ShearerError;

pub use expectations::{
    expected_resamples_test, first_round_test, two_adjacent_events, ExpectationReport,
    FirstRoundReport, FirstRoundRow, PerEventRow,
};
pub use oracle::{
    count_spanning_trees, enumerate_valid, hardcore_partition, path_endpoint_enumeration,
    pr_no_bad_event, sink_orientation_counts, solution_counts, OracleResult, ENUMERATION_BUDGET,
};
pub use presets::{preset_names, run_preset, Preset, PRESETS};
pub use random::{
    random_cnf, random_extremal_instance, random_instance, shearer_region, RandomCnfParams,
    RandomInstanceParams,
};
pub use res_props::{res_set_property_tests, Counterexample, InstanceFamily, ResPropertyReport};
pub use scaling::{
    round_scaling_experiment, LogFit, ScalingApp, ScalingConfig, ScalingReport, SizeRow,
};
pub use truncated::{truncated_sum_convergence_test, TruncatedSumReport};
pub use uniformity::{
    uniformity_from_samples, uniformity_test, BiasedStub, FnSampler, Sampler, UniformityConfig,
    UniformityVerdict,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("state space of {states} assignments exceeds the enumeration budget {budget}")]
    Budget { states: u128, budget: u64 },
    #[error("instance has no valid assignment")]
    Unsatisfiable,
    #[error("instance is not extremal")]
    NotExtremal,
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Shearer(#[from] ShearerError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}
