//! Exact sampling by partial rejection in the variable framework of the
//! Lovász Local Lemma.
//!
//! The crate is organised around the objects the samplers work on:
//!
//! - [`model`]: variables with finite weighted domains, bad events given by
//!   explicit violating sets, the dependency graph, and compatibility queries.
//! - [`sampler`]: Moser-Tardos resampling, partial rejection sampling for
//!   extremal instances, resampling-set selection, and general partial
//!   rejection sampling.
//! - [`shearer`]: exact `q_I` values, expected running times, and the
//!   sufficient conditions for efficiency.
//! - [`graph`]: specialised samplers for sink-free orientations, rooted
//!   spanning trees, and hard-core configurations, plus path analytics.
//! - [`cnf`]: DIMACS input/output and CNF-specific statistics, checkers and
//!   fixtures.
//! - [`verify`]: brute-force oracles and statistical certification.

pub mod cnf;
pub mod exact;
pub mod graph;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod shearer;
pub mod verify;

pub use exact::Rational;
pub use model::{Assignment, DependencyGraph, EventSpec, Instance, ModelError, VariableSpec};
pub use sampler::{RunStats, SamplerConfig, SamplerError, SamplerKind};
