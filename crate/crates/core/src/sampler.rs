//! Moser-Tardos resampling, partial rejection sampling (PRS) for extremal
//! instances, resampling-set selection, and general PRS.
//!
//! Every sampler draws the initial assignment variable by variable in
//! ascending id order, and redraws the variables of a round in ascending id
//! order as well. Specialised samplers in [`crate::graph`] follow the same
//! convention, so a specialised run and a generic run over the encoded
//! instance consume the random stream identically.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Assignment, DependencyGraph, Instance, ModelError};
use crate::rng::{rng_from_seed, SamplerRng};

pub const DEFAULT_ROUND_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    MoserTardos,
    ExtremalPrs,
    GeneralPrs,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::MoserTardos => "moser_tardos",
            SamplerKind::ExtremalPrs => "extremal_prs",
            SamplerKind::GeneralPrs => "general_prs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    /// `None` means unlimited.
    pub round_cap: Option<u64>,
    pub kind: SamplerKind,
    /// Keep the per-round resampling sets in [`RunStats::log`].
    pub record_log: bool,
    /// Refuse non-extremal input in [`extremal_prs`]. Only negative tests
    /// turn this off.
    pub check_extremal: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            round_cap: Some(DEFAULT_ROUND_CAP),
            kind: SamplerKind::GeneralPrs,
            record_log: false,
            check_extremal: true,
        }
    }
}

impl SamplerConfig {
    pub fn new(kind: SamplerKind, seed: u64) -> Self {
        SamplerConfig {
            kind,
            seed,
            ..Default::default()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SamplerConfig {
            seed,
            ..self.clone()
        }
    }

    pub fn with_round_cap(mut self, cap: Option<u64>) -> Self {
        assert!(cap != Some(0), "round cap must be at least 1");
        self.round_cap = cap;
        self
    }

    pub fn with_log(mut self) -> Self {
        self.record_log = true;
        self
    }
}

/// Instrumentation of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub rounds: u64,
    pub total_resamples: u64,
    pub per_event: Vec<u64>,
    pub variable_resamples: u64,
    pub halted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log: Option<Vec<Vec<usize>>>,
}

impl RunStats {
    pub fn new(num_events: usize, record_log: bool) -> Self {
        RunStats {
            rounds: 0,
            total_resamples: 0,
            per_event: vec![0; num_events],
            variable_resamples: 0,
            halted: false,
            log: record_log.then(Vec::new),
        }
    }

    /// Records one round that resampled `events` and `vars` variables.
    pub fn record_round(&mut self, events: &[usize], vars: usize) {
        self.rounds += 1;
        self.total_resamples += events.len() as u64;
        for &e in events {
            self.per_event[e] += 1;
        }
        self.variable_resamples += vars as u64;
        if let Some(log) = self.log.as_mut() {
            log.push(events.to_vec());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplerError {
    #[error("round cap exceeded after {rounds} rounds")]
    RoundCapExceeded { rounds: u64 },
    #[error("instance is not extremal: some dependent events can occur together")]
    NotExtremal,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Processing order of unmarked boundary events in resampling-set selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResOrder {
    /// Breadth-first rounds: every unmarked boundary event of the current
    /// set is tested against the set as it stood at the start of the round,
    /// in ascending id order.
    #[default]
    RoundSnapshot,
    /// One event at a time, smallest unmarked boundary id first, against
    /// the set as updated so far.
    Sequential,
}

/// `Res(σ)` for a total assignment, sorted ascending.
pub fn select_resampling_set(
    instance: &Instance,
    graph: &DependencyGraph,
    assignment: &Assignment,
) -> Result<Vec<usize>, ModelError> {
    let values = total_values(instance, assignment)?;
    Ok(resampling_set(
        instance,
        graph,
        &values,
        ResOrder::RoundSnapshot,
    ))
}

pub(crate) fn total_values(
    instance: &Instance,
    assignment: &Assignment,
) -> Result<Vec<u32>, ModelError> {
    let mut values = Vec::with_capacity(instance.num_vars());
    for v in 0..instance.num_vars() {
        values.push(
            assignment
                .get(v)
                .ok_or(ModelError::MissingValue { var: v })?,
        );
    }
    instance.check_assignment(&values)?;
    Ok(values)
}

/// `Res(σ)` over dense values with an explicit processing order.
pub fn resampling_set(
    instance: &Instance,
    graph: &DependencyGraph,
    values: &[u32],
    order: ResOrder,
) -> Vec<usize> {
    let bad = instance.bad_events(values);
    resampling_set_from_bad(instance, graph, values, &bad, order)
}

fn resampling_set_from_bad(
    instance: &Instance,
    graph: &DependencyGraph,
    values: &[u32],
    bad: &[usize],
    order: ResOrder,
) -> Vec<usize> {
    let m = instance.num_events();
    let mut in_r = vec![false; m];
    let mut in_n = vec![false; m];
    let mut var_in_r = vec![false; instance.num_vars()];
    let add = |e: usize, in_r: &mut Vec<bool>, var_in_r: &mut Vec<bool>| {
        in_r[e] = true;
        for &v in instance.events()[e].vbl() {
            var_in_r[v] = true;
        }
    };
    for &e in bad {
        add(e, &mut in_r, &mut var_in_r);
    }
    let compatible = |e: usize, var_in_r: &[bool]| {
        instance.events()[e].compatible_with(|v| var_in_r[v].then(|| values[v]))
    };
    match order {
        ResOrder::RoundSnapshot => {
            let mut frontier = bad.to_vec();
            loop {
                let boundary: BTreeSet<usize> = frontier
                    .iter()
                    .flat_map(|&i| graph.neighbors(i).iter().copied())
                    .filter(|&j| !in_r[j] && !in_n[j])
                    .collect();
                if boundary.is_empty() {
                    break;
                }
                let mut added = Vec::new();
                for j in boundary {
                    if compatible(j, &var_in_r) {
                        added.push(j);
                    } else {
                        in_n[j] = true;
                    }
                }
                for &j in &added {
                    add(j, &mut in_r, &mut var_in_r);
                }
                frontier = added;
            }
        }
        ResOrder::Sequential => {
            let mut pending: BTreeSet<usize> = bad
                .iter()
                .flat_map(|&i| graph.neighbors(i).iter().copied())
                .filter(|&j| !in_r[j])
                .collect();
            while let Some(j) = pending.pop_first() {
                if compatible(j, &var_in_r) {
                    add(j, &mut in_r, &mut var_in_r);
                    pending.extend(
                        graph
                            .neighbors(j)
                            .iter()
                            .copied()
                            .filter(|&k| !in_r[k] && !in_n[k]),
                    );
                } else {
                    in_n[j] = true;
                }
            }
        }
    }
    (0..m).filter(|&e| in_r[e]).collect()
}

/// Mutable run state with incremental tracking of occurring events.
struct RunState<'a> {
    instance: &'a Instance,
    values: Vec<u32>,
    occurring: Vec<bool>,
    bad: BTreeSet<usize>,
    var_mark: Vec<bool>,
    event_stamp: Vec<u64>,
    stamp: u64,
}

impl<'a> RunState<'a> {
    fn new(instance: &'a Instance, rng: &mut SamplerRng) -> Self {
        let values = instance.sample_values(rng);
        let occurring: Vec<bool> = instance
            .events()
            .iter()
            .map(|e| e.occurs_in(&values))
            .collect();
        let bad = (0..occurring.len()).filter(|&i| occurring[i]).collect();
        RunState {
            instance,
            values,
            bad,
            var_mark: vec![false; instance.num_vars()],
            event_stamp: vec![0; occurring.len()],
            occurring,
            stamp: 0,
        }
    }

    /// Redraws every variable of `events` once, ascending, and refreshes
    /// occurrence of the touched events. Returns the number of variables.
    fn resample(&mut self, events: &[usize], rng: &mut SamplerRng) -> usize {
        let mut vars = Vec::new();
        for &e in events {
            for &v in self.instance.events()[e].vbl() {
                if !self.var_mark[v] {
                    self.var_mark[v] = true;
                    vars.push(v);
                }
            }
        }
        vars.sort_unstable();
        for &v in &vars {
            self.var_mark[v] = false;
            self.values[v] = self.instance.sampler_of(v).sample(rng);
        }
        self.stamp += 1;
        for &v in &vars {
            for &e in self.instance.events_of_var(v) {
                if self.event_stamp[e] == self.stamp {
                    continue;
                }
                self.event_stamp[e] = self.stamp;
                let now = self.instance.events()[e].occurs_in(&self.values);
                if now != self.occurring[e] {
                    self.occurring[e] = now;
                    if now {
                        self.bad.insert(e);
                    } else {
                        self.bad.remove(&e);
                    }
                }
            }
        }
        vars.len()
    }
}

fn drive(
    instance: &Instance,
    config: &SamplerConfig,
    mut select: impl FnMut(&RunState<'_>, &[usize], &mut SamplerRng) -> Vec<usize>,
) -> Result<(Assignment, RunStats), SamplerError> {
    let mut rng = rng_from_seed(config.seed);
    let mut state = RunState::new(instance, &mut rng);
    let mut stats = RunStats::new(instance.num_events(), config.record_log);
    loop {
        if state.bad.is_empty() {
            stats.halted = true;
            return Ok((Assignment::total(state.values), stats));
        }
        if config.round_cap.is_some_and(|cap| stats.rounds >= cap) {
            return Err(SamplerError::RoundCapExceeded {
                rounds: stats.rounds,
            });
        }
        let bad: Vec<usize> = state.bad.iter().copied().collect();
        let chosen = select(&state, &bad, &mut rng);
        let vars = state.resample(&chosen, &mut rng);
        stats.record_round(&chosen, vars);
    }
}

/// Resamples one uniformly chosen occurring event per step.
pub fn moser_tardos(
    instance: &Instance,
    config: &SamplerConfig,
) -> Result<(Assignment, RunStats), SamplerError> {
    drive(instance, config, |_, bad, rng| {
        vec![bad[rng.gen_range(0..bad.len())]]
    })
}

/// Resamples all occurring events each round. Exact on extremal instances.
pub fn extremal_prs(
    instance: &Instance,
    config: &SamplerConfig,
) -> Result<(Assignment, RunStats), SamplerError> {
    if config.check_extremal && !instance.is_extremal()? {
        return Err(SamplerError::NotExtremal);
    }
    drive(instance, config, |_, bad, _| bad.to_vec())
}

/// Resamples `Res(σ)` each round. Exact on every instance.
pub fn general_prs(
    instance: &Instance,
    config: &SamplerConfig,
) -> Result<(Assignment, RunStats), SamplerError> {
    let graph = instance.dependency_graph();
    drive(instance, config, |state, bad, _| {
        resampling_set_from_bad(instance, graph, &state.values, bad, ResOrder::RoundSnapshot)
    })
}

/// Runs the sampler selected by `config.kind`.
pub fn run(
    instance: &Instance,
    config: &SamplerConfig,
) -> Result<(Assignment, RunStats), SamplerError> {
    match config.kind {
        SamplerKind::MoserTardos => moser_tardos(instance, config),
        SamplerKind::ExtremalPrs => extremal_prs(instance, config),
        SamplerKind::GeneralPrs => general_prs(instance, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::model::{EventSpec, VariableSpec};

    fn binary_vars(n: usize) -> Vec<VariableSpec> {
        (0..n).map(|i| VariableSpec::uniform(i, 2)).collect()
    }

    fn hardcore_p3() -> Instance {
        let vars = (0..3)
            .map(|i| VariableSpec::binary(i, ratio(1, 2)))
            .collect();
        Instance::new(
            vars,
            vec![
                EventSpec::single(0, &[(0, 1), (1, 1)]).unwrap(),
                EventSpec::single(1, &[(1, 1), (2, 1)]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn no_events_returns_initial_sample() {
        let inst = Instance::new(binary_vars(5), vec![]).unwrap();
        for kind in [
            SamplerKind::MoserTardos,
            SamplerKind::ExtremalPrs,
            SamplerKind::GeneralPrs,
        ] {
            let cfg = SamplerConfig::new(kind, 42);
            let (a, stats) = run(&inst, &cfg).unwrap();
            assert_eq!(a, inst.sample_product(&mut rng_from_seed(42)));
            assert_eq!(stats.total_resamples, 0);
            assert_eq!(stats.rounds, 0);
            assert!(stats.halted);
        }
    }

    #[test]
    fn unsatisfiable_hits_cap() {
        let all = vec![vec![0], vec![1]];
        let inst = Instance::new(
            binary_vars(1),
            vec![EventSpec::new(0, vec![0], all).unwrap()],
        )
        .unwrap();
        for kind in [
            SamplerKind::MoserTardos,
            SamplerKind::ExtremalPrs,
            SamplerKind::GeneralPrs,
        ] {
            let cfg = SamplerConfig::new(kind, 1).with_round_cap(Some(50));
            assert_eq!(
                run(&inst, &cfg).unwrap_err(),
                SamplerError::RoundCapExceeded { rounds: 50 }
            );
        }
    }

    #[test]
    fn extremal_prs_rejects_non_extremal() {
        let inst = hardcore_p3();
        let cfg = SamplerConfig::new(SamplerKind::ExtremalPrs, 1);
        assert_eq!(
            extremal_prs(&inst, &cfg).unwrap_err(),
            SamplerError::NotExtremal
        );
        let unchecked = SamplerConfig {
            check_extremal: false,
            ..cfg
        };
        assert!(extremal_prs(&inst, &unchecked).is_ok());
    }

    #[test]
    fn res_of_hardcore_p3_hand_trace() {
        // u, v occupied, w empty: {uv} bad, {vw} compatible through v.
        let inst = hardcore_p3();
        let g = inst.dependency_graph();
        let res = select_resampling_set(&inst, g, &Assignment::total(vec![1, 1, 0])).unwrap();
        assert_eq!(res, vec![0, 1]);
        // Only w occupied: nothing bad.
        let res = select_resampling_set(&inst, g, &Assignment::total(vec![0, 0, 1])).unwrap();
        assert!(res.is_empty());
        // u occupied alone with v empty: no bad event.
        assert!(
            select_resampling_set(&inst, g, &Assignment::total(vec![1, 0, 1]))
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn res_equals_bad_on_extremal() {
        // (x ∨ y) ∧ (¬y ∨ z): x=y=0 violates the first clause only.
        let inst = Instance::new(
            binary_vars(3),
            vec![
                EventSpec::clause(0, &[(0, true), (1, true)]).unwrap(),
                EventSpec::clause(1, &[(1, false), (2, true)]).unwrap(),
            ],
        )
        .unwrap();
        let g = inst.dependency_graph();
        for bits in 0..8u32 {
            let values: Vec<u32> = (0..3).map(|b| (bits >> b) & 1).collect();
            let res = resampling_set(&inst, g, &values, ResOrder::RoundSnapshot);
            assert_eq!(res, inst.bad_events(&values));
        }
    }

    #[test]
    fn partial_assignment_is_rejected() {
        let inst = hardcore_p3();
        let err = select_resampling_set(
            &inst,
            inst.dependency_graph(),
            &Assignment::from_pairs(3, &[(0, 1)]),
        );
        assert!(matches!(err, Err(ModelError::MissingValue { .. })));
    }

    #[test]
    fn deterministic_and_logged() {
        let inst = hardcore_p3();
        let cfg = SamplerConfig::new(SamplerKind::GeneralPrs, 17).with_log();
        let a = general_prs(&inst, &cfg).unwrap();
        let b = general_prs(&inst, &cfg).unwrap();
        assert_eq!(a, b);
        let stats = a.1;
        assert_eq!(stats.log.as_ref().unwrap().len() as u64, stats.rounds);
        assert_eq!(stats.per_event.iter().sum::<u64>(), stats.total_resamples);
        let json = serde_json::to_value(&stats).unwrap();
        for key in [
            "rounds",
            "total_resamples",
            "per_event",
            "variable_resamples",
            "halted",
            "log",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
        let unlogged =
            serde_json::to_value(general_prs(&inst, &cfg.with_seed(3).clone()).unwrap().1).unwrap();
        assert!(unlogged.get("log").is_some());
        let mut plain = SamplerConfig::new(SamplerKind::GeneralPrs, 3);
        plain.record_log = false;
        let unlogged = serde_json::to_value(general_prs(&inst, &plain).unwrap().1).unwrap();
        assert!(unlogged.get("log").is_none());
    }
}
