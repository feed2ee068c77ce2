use serde::Serialize;

use super::{
    uniformity_test, BiasedStub, FnSampler, Sampler, UniformityConfig, UniformityVerdict,
    VerifyError,
};
use crate::cnf::CnfFormula;
use crate::exact::int;
use crate::graph::encode::{
    arrows_to_values, hardcore_instance, hardcore_to_values, orientation_to_values,
    sink_free_instance, spanning_tree_instance,
};
use crate::graph::{cycle_popping, hardcore_sample, sink_popping, Graph, GraphError};
use crate::model::Instance;
use crate::sampler::{SamplerConfig, SamplerError, SamplerKind};

/// A named small instance with a known uniform target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// `false` for negative controls, which are supposed to fail.
    pub expect_pass: bool,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "c3-sink",
        description: "sink-free orientations of the 3-cycle by sink popping (2 outcomes)",
        expect_pass: true,
    },
    Preset {
        name: "c4-sink",
        description: "sink-free orientations of the 4-cycle by sink popping (2 outcomes)",
        expect_pass: true,
    },
    Preset {
        name: "k4-tree",
        description: "spanning trees of K4 rooted at 0 by cycle popping (16 outcomes)",
        expect_pass: true,
    },
    Preset {
        name: "p5-hardcore",
        description: "hard-core model on the 5-vertex path, fugacity 1 (13 outcomes)",
        expect_pass: true,
    },
    Preset {
        name: "cnf-chain",
        description: "(x or y) and (y or z) by general partial rejection sampling (5 outcomes)",
        expect_pass: true,
    },
    Preset {
        name: "negative-control",
        description: "biased stub on (x or y) and (y or z); must fail",
        expect_pass: false,
    },
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

fn cnf_chain() -> Instance {
    CnfFormula::new(3, vec![vec![1, 2], vec![2, 3]])
        .expect("valid formula")
        .to_instance()
}

fn graph_error(e: GraphError) -> SamplerError {
    match e {
        GraphError::Sampler(inner) => inner,
        other => panic!("preset graph is valid: {other}"),
    }
}

fn seeded(seed: u64) -> SamplerConfig {
    SamplerConfig::default().with_seed(seed)
}

/// Runs the uniformity test of a preset with `samples` draws.
pub fn run_preset(name: &str, samples: usize, seed: u64) -> Result<UniformityVerdict, VerifyError> {
    let config = UniformityConfig {
        seed,
        ..UniformityConfig::default()
    };
    let run = |sampler: &dyn Sampler, instance: &Instance| {
        uniformity_test(sampler, instance, samples, &config)
    };
    match name {
        "c3-sink" | "c4-sink" => {
            let graph = Graph::cycle(if name == "c3-sink" { 3 } else { 4 });
            let sampler = FnSampler::new("sink_popping", |_: &Instance, s| {
                sink_popping(&graph, &seeded(s)).map(|(o, _)| orientation_to_values(&o))
            });
            run(&sampler, &sink_free_instance(&graph))
        }
        "k4-tree" => {
            let graph = Graph::complete(4);
            let sampler = FnSampler::new("cycle_popping", |_: &Instance, s| {
                cycle_popping(&graph, 0, &seeded(s))
                    .map(|(a, _)| arrows_to_values(&graph, &a))
                    .map_err(graph_error)
            });
            run(&sampler, &spanning_tree_instance(&graph, 0)?)
        }
        "p5-hardcore" => {
            let graph = Graph::path(5);
            let lambda = int(1);
            let sampler = FnSampler::new("hardcore_prs", |_: &Instance, s| {
                hardcore_sample(&graph, &lambda, &seeded(s)).map(|(c, _)| hardcore_to_values(&c))
            });
            run(&sampler, &hardcore_instance(&graph, &lambda))
        }
        "cnf-chain" => run(&SamplerKind::GeneralPrs, &cnf_chain()),
        "negative-control" => {
            let instance = cnf_chain();
            run(&BiasedStub::for_instance(&instance)?, &instance)
        }
        other => Err(VerifyError::UnknownPreset(other.to_string())),
    }
}
