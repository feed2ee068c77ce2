use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{enumerate_valid, OracleResult, VerifyError};
use crate::model::Instance;
use crate::rng::{derive_seed, mix64, rng_from_seed};
use crate::sampler::{self, SamplerConfig, SamplerError, SamplerKind};

/// Something that produces one total assignment of an instance per seed.
pub trait Sampler: Sync {
    fn sample(&self, instance: &Instance, seed: u64) -> Result<Vec<u32>, SamplerError>;
    fn name(&self) -> String;
}

impl Sampler for SamplerKind {
    fn sample(&self, instance: &Instance, seed: u64) -> Result<Vec<u32>, SamplerError> {
        let (a, _) = sampler::run(instance, &SamplerConfig::new(*self, seed))?;
        Ok(a.to_values().expect("total"))
    }

    fn name(&self) -> String {
        SamplerKind::name(*self).to_string()
    }
}

/// Wraps a closure, typically a specialised sampler mapped to instance
/// values.
pub struct FnSampler<F> {
    pub name: String,
    pub f: F,
}

impl<F> FnSampler<F>
where
    F: Fn(&Instance, u64) -> Result<Vec<u32>, SamplerError> + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnSampler {
            name: name.into(),
            f,
        }
    }
}

impl<F> Sampler for FnSampler<F>
where
    F: Fn(&Instance, u64) -> Result<Vec<u32>, SamplerError> + Sync,
{
    fn sample(&self, instance: &Instance, seed: u64) -> Result<Vec<u32>, SamplerError> {
        (self.f)(instance, seed)
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

/// Deliberately biased sampler: with probability `bias` it returns a fixed
/// valid assignment, otherwise it defers to general partial rejection
/// sampling. Used to show that the uniformity test has power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasedStub {
    pub fixed: Vec<u32>,
    pub bias: f64,
}

impl BiasedStub {
    /// Biased toward the lexicographically first valid assignment with
    /// probability 1/4.
    pub fn for_instance(instance: &Instance) -> Result<Self, VerifyError> {
        let oracle = enumerate_valid(instance)?;
        let fixed = oracle
            .valid_assignments
            .first()
            .cloned()
            .ok_or(VerifyError::Unsatisfiable)?;
        Ok(BiasedStub { fixed, bias: 0.25 })
    }
}

impl Sampler for BiasedStub {
    fn sample(&self, instance: &Instance, seed: u64) -> Result<Vec<u32>, SamplerError> {
        let mut coin = rng_from_seed(mix64(seed ^ 0xB1A5_ED00_0000_0001));
        if coin.gen::<f64>() < self.bias {
            Ok(self.fixed.clone())
        } else {
            SamplerKind::GeneralPrs.sample(instance, seed)
        }
    }

    fn name(&self) -> String {
        format!("biased_stub({})", self.bias)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityConfig {
    pub seed: u64,
    pub tv_threshold: f64,
    pub p_threshold: f64,
}

impl Default for UniformityConfig {
    fn default() -> Self {
        UniformityConfig {
            seed: 0,
            tv_threshold: 0.01,
            p_threshold: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityVerdict {
    pub sampler: String,
    pub samples: usize,
    pub outcomes: usize,
    /// Samples that landed outside the oracle's support.
    pub outside_support: usize,
    pub tv: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
    pub tv_threshold: f64,
    pub p_threshold: f64,
    pub pass: bool,
}

/// Compares sampled assignments against the oracle's exact law.
pub fn uniformity_from_samples(
    sampler: &str,
    oracle: &OracleResult,
    samples: &[Vec<u32>],
    config: &UniformityConfig,
) -> UniformityVerdict {
    let target = oracle.distribution();
    let mut counts: BTreeMap<&[u32], u64> = BTreeMap::new();
    for s in samples {
        *counts.entry(s.as_slice()).or_insert(0) += 1;
    }
    let n = samples.len() as f64;
    let mut outside = 0usize;
    let mut tv = 0.0;
    for (outcome, &c) in &counts {
        if !target.contains_key(*outcome) {
            outside += c as usize;
            tv += c as f64 / n;
        }
    }
    let mut chi = 0.0;
    for (outcome, &p) in &target {
        let observed = counts.get(outcome.as_slice()).copied().unwrap_or(0) as f64;
        tv += (observed / n - p).abs();
        let expected = p * n;
        chi += (observed - expected).powi(2) / expected;
    }
    tv /= 2.0;
    let dof = target.len().saturating_sub(1);
    let p_value = if outside > 0 || samples.is_empty() {
        0.0
    } else if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(chi)
    };
    let pass = tv <= config.tv_threshold && p_value >= config.p_threshold;
    UniformityVerdict {
        sampler: sampler.to_string(),
        samples: samples.len(),
        outcomes: target.len(),
        outside_support: outside,
        tv,
        chi_square: chi,
        dof,
        p_value,
        tv_threshold: config.tv_threshold,
        p_threshold: config.p_threshold,
        pass,
    }
}

/// Draws `samples` outputs (sample `i` seeded by `derive_seed(seed, i)`)
/// and compares them with exhaustive enumeration.
pub fn uniformity_test(
    sampler: &dyn Sampler,
    instance: &Instance,
    samples: usize,
    config: &UniformityConfig,
) -> Result<UniformityVerdict, VerifyError> {
    let oracle = enumerate_valid(instance)?;
    let draws = (0..samples)
        .into_par_iter()
        .map(|i| sampler.sample(instance, derive_seed(config.seed, i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(uniformity_from_samples(
        &sampler.name(),
        &oracle,
        &draws,
        config,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::graph::{encode::hardcore_instance, Graph};

    #[test]
    fn general_prs_passes_on_small_hardcore() {
        let inst = hardcore_instance(&Graph::path(3), &int(1));
        let v = uniformity_test(
            &SamplerKind::GeneralPrs,
            &inst,
            20_000,
            &UniformityConfig::default(),
        )
        .unwrap();
        assert_eq!(v.outcomes, 5);
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn biased_stub_fails() {
        let inst = hardcore_instance(&Graph::path(3), &int(1));
        let stub = BiasedStub::for_instance(&inst).unwrap();
        let v = uniformity_test(&stub, &inst, 20_000, &UniformityConfig::default()).unwrap();
        assert!(!v.pass);
        assert!(v.tv > 0.1);
    }

    #[test]
    fn samples_outside_support_fail() {
        let inst = hardcore_instance(&Graph::path(2), &int(1));
        let oracle = enumerate_valid(&inst).unwrap();
        let samples = vec![vec![1, 1]; 10];
        let v = uniformity_from_samples("bad", &oracle, &samples, &UniformityConfig::default());
        assert_eq!(v.outside_support, 10);
        assert_eq!(v.p_value, 0.0);
        assert!(!v.pass);
    }
}
