use rand::Rng;
use serde::{Deserialize, Serialize};

use super::random::{
    random_cnf, random_extremal_instance, random_instance, RandomCnfParams, RandomInstanceParams,
};
use crate::model::{instance_to_json, Instance};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sampler::{resampling_set, ResOrder};

/// Source of random instances for the resampling-set property trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceFamily {
    Cnf(RandomCnfParams),
    General(RandomInstanceParams),
    Extremal(RandomInstanceParams),
}

impl InstanceFamily {
    fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Instance {
        match self {
            InstanceFamily::Cnf(p) => random_cnf(rng, p).to_instance(),
            InstanceFamily::General(p) => random_instance(rng, p),
            InstanceFamily::Extremal(p) => random_extremal_instance(rng, p),
        }
    }
}

/// A violated property with the data needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub property: String,
    pub instance_json: String,
    pub values: Vec<u32>,
    pub res: Vec<usize>,
    pub bad: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResPropertyReport {
    pub family: InstanceFamily,
    pub trials: usize,
    pub containment_violations: usize,
    pub unblocking_violations: usize,
    pub stability_checked: usize,
    /// Re-randomisations rejected because they created a bad event outside
    /// the resampling set.
    pub stability_skipped: usize,
    pub stability_violations: usize,
    /// Trials on extremal instances where `Res != Bad`.
    pub extremal_res_ne_bad: usize,
    pub extremal_trials: usize,
    /// Trials where the breadth-first and one-at-a-time orders disagree.
    pub order_discrepancies: usize,
    /// First few counterexamples, verbatim.
    pub counterexamples: Vec<Counterexample>,
}

impl ResPropertyReport {
    pub fn violations(&self) -> usize {
        self.containment_violations
            + self.unblocking_violations
            + self.stability_violations
            + self.extremal_res_ne_bad
    }
}

const MAX_COUNTEREXAMPLES: usize = 5;

/// Checks, on `trials` random `(instance, σ)` pairs:
/// - `Bad(σ) ⊆ Res(σ)`;
/// - every boundary event of `Res(σ)` is impossible given `σ` on `vbl(Res(σ))`;
/// - redrawing every variable outside `vbl(Res(σ))` leaves `Res` unchanged
///   whenever no new bad event appears outside `Res(σ)`;
/// - `Res(σ) = Bad(σ)` on extremal instances.
pub fn res_set_property_tests(
    family: InstanceFamily,
    trials: usize,
    seed: u64,
) -> ResPropertyReport {
    let mut report = ResPropertyReport {
        family,
        trials,
        containment_violations: 0,
        unblocking_violations: 0,
        stability_checked: 0,
        stability_skipped: 0,
        stability_violations: 0,
        extremal_res_ne_bad: 0,
        extremal_trials: 0,
        order_discrepancies: 0,
        counterexamples: Vec::new(),
    };
    for trial in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, trial as u64));
        let instance = family.generate(&mut rng);
        let graph = instance.dependency_graph();
        let values = instance
            .sample_product(&mut rng)
            .to_values()
            .expect("total");
        let bad = instance.bad_events(&values);
        let res = resampling_set(&instance, graph, &values, ResOrder::RoundSnapshot);
        let record = |report: &mut ResPropertyReport, property: &str| {
            if report.counterexamples.len() < MAX_COUNTEREXAMPLES {
                report.counterexamples.push(Counterexample {
                    trial,
                    property: property.to_string(),
                    instance_json: instance_to_json(&instance),
                    values: values.clone(),
                    res: res.clone(),
                    bad: bad.clone(),
                });
            }
        };

        let mut in_res = vec![false; instance.num_events()];
        for &e in &res {
            in_res[e] = true;
        }
        if bad.iter().any(|&e| !in_res[e]) {
            report.containment_violations += 1;
            record(&mut report, "containment");
        }

        let mut var_in_res = vec![false; instance.num_vars()];
        for &e in &res {
            for &v in instance.events()[e].vbl() {
                var_in_res[v] = true;
            }
        }
        let boundary_blocked = (0..instance.num_events())
            .filter(|&j| !in_res[j] && graph.neighbors(j).iter().any(|&i| in_res[i]))
            .all(|j| !instance.events()[j].compatible_with(|v| var_in_res[v].then(|| values[v])));
        if !boundary_blocked {
            report.unblocking_violations += 1;
            record(&mut report, "unblocking");
        }

        let mut redrawn = instance
            .sample_product(&mut rng)
            .to_values()
            .expect("total");
        for v in 0..instance.num_vars() {
            if var_in_res[v] {
                redrawn[v] = values[v];
            }
        }
        if instance.bad_events(&redrawn).iter().all(|&e| in_res[e]) {
            report.stability_checked += 1;
            if resampling_set(&instance, graph, &redrawn, ResOrder::RoundSnapshot) != res {
                report.stability_violations += 1;
                record(&mut report, "stability");
            }
        } else {
            report.stability_skipped += 1;
        }

        if instance.is_extremal().unwrap_or(false) {
            report.extremal_trials += 1;
            if res != bad {
                report.extremal_res_ne_bad += 1;
                record(&mut report, "extremal_res_equals_bad");
            }
        }

        if resampling_set(&instance, graph, &values, ResOrder::Sequential) != res {
            report.order_discrepancies += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_have_no_violations() {
        for family in [
            InstanceFamily::Cnf(RandomCnfParams::default()),
            InstanceFamily::General(RandomInstanceParams::default()),
            InstanceFamily::Extremal(RandomInstanceParams::default()),
        ] {
            let report = res_set_property_tests(family, 300, 11);
            assert_eq!(report.violations(), 0, "{report:?}");
            assert!(report.stability_checked > 0);
        }
    }

    #[test]
    fn extremal_family_is_always_checked() {
        let report = res_set_property_tests(
            InstanceFamily::Extremal(RandomInstanceParams::default()),
            100,
            3,
        );
        assert_eq!(report.extremal_trials, 100);
    }
}
