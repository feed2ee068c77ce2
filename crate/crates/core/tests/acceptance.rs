//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! `PASS`/`FAIL` line per criterion (with the sub-checks underneath), and
//! exits non-zero if any criterion fails.

use std::error::Error;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::One;
use prs_core::cnf::{cnf_stats, hard_example, CnfFormula};
use prs_core::exact::{int, pow, ratio, Rational};
use prs_core::graph::encode::{hardcore_instance, sink_free_instance, spanning_tree_instance};
use prs_core::graph::{det_w_prime, endpoint_matrix, path_partition, sink_popping, Graph};
use prs_core::rng::{derive_seed, rng_from_seed};
use prs_core::sampler::{SamplerConfig, SamplerKind};
use prs_core::shearer::{
    all_q_values, expected_resamples, linear_coefficient, symmetric_pc, QCalculator,
};
use prs_core::verify::{
    count_spanning_trees, expected_resamples_test, first_round_test, hardcore_partition,
    path_endpoint_enumeration, pr_no_bad_event, random_extremal_instance, random_instance,
    res_set_property_tests, round_scaling_experiment, run_preset, shearer_region,
    sink_orientation_counts, solution_counts, two_adjacent_events, uniformity_test, BiasedStub,
    InstanceFamily, RandomCnfParams, RandomInstanceParams, ScalingApp, ScalingConfig,
    UniformityConfig,
};
use prs_core::Instance;

const SEED: u64 = 20_240_601;
const N: usize = 100_000;

type Checks = Vec<(String, bool)>;
type Outcome = Result<Checks, Box<dyn Error>>;
type UniformityCase = (&'static str, Instance, usize);
type Criterion = (&'static str, fn() -> Outcome);

fn check(checks: &mut Checks, ok: bool, label: impl Into<String>) {
    checks.push((label.into(), ok));
}

fn cnf_chain() -> Instance {
    CnfFormula::new(3, vec![vec![1, 2], vec![2, 3]])
        .unwrap()
        .to_instance()
}

/// The five uniformity cases, as (preset name, encoded instance, outcome count).
fn uniformity_cases() -> Result<Vec<UniformityCase>, Box<dyn Error>> {
    Ok(vec![
        ("c3-sink", sink_free_instance(&Graph::cycle(3)), 2),
        ("c4-sink", sink_free_instance(&Graph::cycle(4)), 2),
        (
            "k4-tree",
            spanning_tree_instance(&Graph::complete(4), 0)?,
            16,
        ),
        (
            "p5-hardcore",
            hardcore_instance(&Graph::path(5), &int(1)),
            13,
        ),
        ("cnf-chain", cnf_chain(), 5),
    ])
}

fn c1_uniformity() -> Outcome {
    let mut checks = Vec::new();
    let trees = count_spanning_trees(&Graph::complete(4))?;
    check(
        &mut checks,
        trees == 16,
        format!("K4 spanning trees by enumeration = {trees} (Cayley 4^2 = 16)"),
    );
    let z = hardcore_partition(&Graph::path(5), &int(1))?;
    check(
        &mut checks,
        z == int(13),
        format!("P5 independent sets = {z}"),
    );
    let config = UniformityConfig {
        seed: SEED,
        ..UniformityConfig::default()
    };
    for (name, instance, outcomes) in uniformity_cases()? {
        let start = Instant::now();
        let v = run_preset(name, N, SEED)?;
        let elapsed = start.elapsed();
        check(
            &mut checks,
            v.pass && v.outcomes == outcomes && elapsed <= Duration::from_secs(120),
            format!(
                "{name} [{}]: outcomes {} tv {:.5} <= {} p {:.4} >= {} ({:.1}s)",
                v.sampler,
                v.outcomes,
                v.tv,
                v.tv_threshold,
                v.p_value,
                v.p_threshold,
                elapsed.as_secs_f64()
            ),
        );
        let start = Instant::now();
        let g = uniformity_test(&SamplerKind::GeneralPrs, &instance, N, &config)?;
        let elapsed = start.elapsed();
        check(
            &mut checks,
            g.pass && elapsed <= Duration::from_secs(120),
            format!(
                "{name} [general_prs on encoding]: tv {:.5} p {:.4} ({:.1}s)",
                g.tv,
                g.p_value,
                elapsed.as_secs_f64()
            ),
        );
    }
    Ok(checks)
}

fn c2_expected_work() -> Outcome {
    let mut checks = Vec::new();
    let c3 = Graph::cycle(3);
    let inst = sink_free_instance(&c3);
    let exact = expected_resamples(inst.dependency_graph(), &inst.probabilities())?;
    let (z0, z1) = sink_orientation_counts(&c3)?;
    check(
        &mut checks,
        exact == int(3) && Rational::new((z1 as i64).into(), (z0 as i64).into()) == exact,
        format!("C3 exact E[T] = {exact}, brute force Z1/Z0 = {z1}/{z0}"),
    );
    let total: u64 = (0..N)
        .map(|i| {
            let cfg = SamplerConfig::default().with_seed(derive_seed(SEED, i as u64));
            sink_popping(&c3, &cfg).map(|(_, s)| s.total_resamples)
        })
        .sum::<Result<u64, _>>()?;
    let mean = total as f64 / N as f64;
    check(
        &mut checks,
        (mean - 3.0).abs() <= 0.05,
        format!("C3 sink popping mean resampled sinks {mean:.4} = 3 +/- 0.05"),
    );
    let toy = two_adjacent_events();
    let report = expected_resamples_test(&toy, N, &SamplerConfig::default().with_seed(SEED))?;
    check(
        &mut checks,
        report.exact == "1" && (report.mean - 1.0).abs() <= 0.02,
        format!(
            "two adjacent events mean T {:.4} = 1 +/- 0.02 (exact {})",
            report.mean, report.exact
        ),
    );
    check(
        &mut checks,
        report.pass,
        format!("toy per-event z-scores within 3 (total z {:.2})", report.z),
    );
    Ok(checks)
}

fn c3_q_exactness() -> Outcome {
    let mut checks = Vec::new();
    let params = RandomInstanceParams {
        num_vars: 8,
        max_domain: 3,
        num_events: 8,
        max_event_vars: 3,
        max_tuples: 3,
        max_states: 1 << 20,
    };
    let mut rng = rng_from_seed(SEED);
    let (mut equal, mut normalised, mut extremal) = (0, 0, 0);
    for _ in 0..200 {
        let inst = random_extremal_instance(&mut rng, &params);
        extremal += inst.is_extremal()? as usize;
        let graph = inst.dependency_graph();
        let p = inst.probabilities();
        let q_empty = QCalculator::new(graph, &p)?.q_empty();
        equal += (pr_no_bad_event(&inst)? == q_empty) as usize;
        let total: Rational = all_q_values(graph, &p)?.into_iter().map(|(_, q)| q).sum();
        normalised += total.is_one() as usize;
    }
    check(
        &mut checks,
        extremal == 200,
        format!("{extremal}/200 generated instances extremal"),
    );
    check(
        &mut checks,
        equal == 200,
        format!("{equal}/200 extremal: Pr(no bad event) = q_empty exactly"),
    );
    check(
        &mut checks,
        normalised == 200,
        format!("{normalised}/200 extremal: sum of q_I = 1"),
    );

    let (mut found, mut dominated, mut normalised, mut strict, mut attempts) = (0, 0, 0, 0, 0);
    while found < 200 && attempts < 100_000 {
        attempts += 1;
        let inst = random_instance(&mut rng, &params);
        let graph = inst.dependency_graph();
        let p = inst.probabilities();
        if inst.is_extremal()? || !shearer_region(graph, &p) {
            continue;
        }
        found += 1;
        let q_empty = QCalculator::new(graph, &p)?.q_empty();
        let pr = pr_no_bad_event(&inst)?;
        dominated += (pr >= q_empty) as usize;
        strict += (pr > q_empty) as usize;
        let total: Rational = all_q_values(graph, &p)?.into_iter().map(|(_, q)| q).sum();
        normalised += total.is_one() as usize;
    }
    check(
        &mut checks,
        found == 200,
        format!("{found} non-extremal instances in Shearer's region ({attempts} drawn)"),
    );
    check(
        &mut checks,
        dominated == found,
        format!("{dominated}/{found} non-extremal: Pr(no bad event) >= q_empty ({strict} strict)"),
    );
    check(
        &mut checks,
        normalised == found,
        format!("{normalised}/{found} non-extremal: sum of q_I = 1"),
    );
    Ok(checks)
}

fn c4_first_round() -> Outcome {
    let mut checks = Vec::new();
    let cfg = SamplerConfig::default().with_seed(SEED);
    for (name, inst) in [
        ("two adjacent events", two_adjacent_events()),
        ("sink-free C3", sink_free_instance(&Graph::cycle(3))),
    ] {
        let r = first_round_test(&inst, N, &cfg)?;
        let worst = r.rows.iter().fold(0.0f64, |m, row| m.max(row.z.abs()));
        check(
            &mut checks,
            r.pass,
            format!(
                "{name}: {} independent sets, max |z| {worst:.2} <= 3, dependent sets {}",
                r.rows.len(),
                r.dependent_sets
            ),
        );
    }
    Ok(checks)
}

fn c5_res_properties() -> Outcome {
    let mut checks = Vec::new();
    let trials = 10_000;
    for (name, family) in [
        ("cnf", InstanceFamily::Cnf(RandomCnfParams::default())),
        (
            "general",
            InstanceFamily::General(RandomInstanceParams::default()),
        ),
        (
            "extremal",
            InstanceFamily::Extremal(RandomInstanceParams::default()),
        ),
    ] {
        let r = res_set_property_tests(family, trials, SEED);
        check(
            &mut checks,
            r.containment_violations == 0 && r.unblocking_violations == 0 && r.stability_violations == 0,
            format!(
                "{name}: {trials} trials, violations containment {} unblocking {} stability {} ({} checked, {} skipped)",
                r.containment_violations,
                r.unblocking_violations,
                r.stability_violations,
                r.stability_checked,
                r.stability_skipped
            ),
        );
        check(
            &mut checks,
            r.extremal_res_ne_bad == 0 && (name != "extremal" || r.extremal_trials == trials),
            format!(
                "{name}: Res = Bad on all {} extremal trials",
                r.extremal_trials
            ),
        );
        for c in &r.counterexamples {
            println!("    counterexample: {}", serde_json::to_string(c)?);
        }
    }
    Ok(checks)
}

/// `I_k` by brute force over subsets of a `k`-path.
fn brute_partition(k: usize, lambda: &Rational) -> Rational {
    (0u32..(1 << k))
        .filter(|m| m & (m >> 1) == 0)
        .map(|m| pow(lambda, m.count_ones() as usize))
        .sum()
}

fn c6_path_analytics() -> Outcome {
    let mut checks = Vec::new();
    let (mut det_ok, mut enum_ok, mut partition_ok, mut cases) = (0, 0, 0, 0);
    for lambda in [ratio(1, 2), int(1), int(2)] {
        for k in 4..=12 {
            cases += 1;
            let w = endpoint_matrix(k, &lambda)?;
            let ik = path_partition(k, &lambda);
            partition_ok += (ik == brute_partition(k, &lambda)) as usize;
            let sign = if k % 2 == 1 { int(1) } else { int(-1) };
            det_ok += (w.det() == sign * pow(&lambda, k) / (&ik * &ik)) as usize;
            enum_ok += (w.w == path_endpoint_enumeration(k, &lambda)) as usize;
        }
    }
    check(
        &mut checks,
        partition_ok == cases,
        format!("I_k recurrence = brute force in {partition_ok}/{cases} cases"),
    );
    check(
        &mut checks,
        det_ok == cases,
        format!("det W_k = (-1)^(k-1) lambda^k / I_k^2 in {det_ok}/{cases} cases"),
    );
    check(
        &mut checks,
        enum_ok == cases,
        format!("W_k = weighted enumeration in {enum_ok}/{cases} cases"),
    );
    let mut prime_ok = true;
    for lambda in [ratio(1, 2), int(1), int(2)] {
        prime_ok &= det_w_prime(4, &lambda)? == -(&lambda * &lambda);
    }
    check(
        &mut checks,
        prime_ok,
        "det W'_4 = -lambda^2 for lambda in {1/2, 1, 2}",
    );
    let a = prs_core::graph::alpha(2.0);
    check(
        &mut checks,
        (a - 0.5).abs() < 1e-12,
        format!("alpha(2) = {a}"),
    );
    Ok(checks)
}

fn c7_efficiency() -> Outcome {
    let mut checks = Vec::new();
    let start = Instant::now();
    let app = ScalingApp::Hardcore {
        d: 3,
        lambda: ratio(1, 10),
    };
    let config = ScalingConfig {
        seed: SEED,
        ..ScalingConfig::default()
    };
    let report = round_scaling_experiment(&app, &config)?;
    check(
        &mut checks,
        report.condition_ok,
        "lambda = 0.1 satisfies lambda(2 sqrt(e) d - 1) <= 1 at d = 3",
    );
    for row in &report.rows {
        println!(
            "    m {:>6}  mean rounds {:.3} (se {:.3})  resamples/m {:.4}  decay {:.4} (se {:.4})",
            row.m,
            row.mean_rounds,
            row.se_rounds,
            row.mean_resamples_per_m,
            row.decay_factor.unwrap_or(f64::NAN),
            row.decay_se.unwrap_or(f64::NAN)
        );
    }
    let m_lo = report.rows.first().map(|r| r.m).unwrap_or(0);
    let m_hi = report.rows.last().map(|r| r.m).unwrap_or(0);
    check(
        &mut checks,
        m_hi >= 100 * m_lo,
        format!("m spans {m_lo}..{m_hi}"),
    );
    let worst = report
        .rows
        .iter()
        .fold(0.0f64, |a, r| a.max(r.mean_resamples_per_m));
    check(
        &mut checks,
        worst <= 10.0,
        format!("max mean resampled events / m = {worst:.4} <= 10"),
    );
    let fit = &report.fit;
    check(
        &mut checks,
        fit.b >= 0.0 && !report.super_logarithmic && fit.max_abs_residual <= 1.0,
        format!(
            "rounds = {:.3} + {:.3} ln m, max |residual| {:.3}, curvature {:.4}",
            fit.a, fit.b, fit.max_abs_residual, fit.curvature
        ),
    );
    check(
        &mut checks,
        report.monotone_rounds,
        "mean rounds nondecreasing within 3 se",
    );
    let bound = report.decay_bound.unwrap_or(0.0);
    check(
        &mut checks,
        report.decay_within_bound() == Some(true),
        format!("decay factor <= (4e*9 - 1)p + 3 se = {bound:.4} + 3 se at every size"),
    );
    // same size, different seed
    let again = round_scaling_experiment(
        &app,
        &ScalingConfig {
            seed: SEED ^ 0xFFFF,
            sizes: vec![m_lo],
            ..config.clone()
        },
    )?;
    let (a, b) = (&report.rows[0], &again.rows[0]);
    let se = (a.se_rounds.powi(2) + b.se_rounds.powi(2)).sqrt();
    check(
        &mut checks,
        (a.mean_rounds - b.mean_rounds).abs() <= 3.0 * se,
        format!(
            "reseeded repeat at m = {m_lo}: {:.3} vs {:.3}",
            a.mean_rounds, b.mean_rounds
        ),
    );
    let elapsed = start.elapsed();
    check(
        &mut checks,
        elapsed <= Duration::from_secs(600),
        format!("runtime {:.1}s <= 600s", elapsed.as_secs_f64()),
    );
    Ok(checks)
}

fn c8_hard_fixture() -> Outcome {
    let mut checks = Vec::new();
    for m in 1..=3 {
        let f = hard_example(m);
        let (z0, z1) = solution_counts(&f)?;
        let stats = cnf_stats(&f);
        check(
            &mut checks,
            z0 == 1 && z1 >= 3u64.pow(m as u32) && stats.extremal,
            format!(
                "m = {m}: Z0 = {z0}, Z1 = {z1} >= {}, extremal {}",
                3u64.pow(m as u32),
                stats.extremal
            ),
        );
    }
    let inst = hard_example(2).to_instance();
    let t = expected_resamples(inst.dependency_graph(), &inst.probabilities())?;
    let (z0, z1) = solution_counts(&hard_example(2))?;
    check(
        &mut checks,
        t > int(9) && t == Rational::new((z1 as i64).into(), (z0 as i64).into()),
        format!("m = 2: E[T] = {t} > 9 (brute force Z1/Z0 = {z1}/{z0})"),
    );
    Ok(checks)
}

fn c9_checkers() -> Outcome {
    let mut checks = Vec::new();
    let pc = symmetric_pc(3)?;
    check(&mut checks, pc == ratio(4, 27), format!("p_c(3) = {pc}"));
    let p = ratio(1, 8);
    let coef = linear_coefficient(3, &p)?;
    let expected = &p / (ratio(4, 27) - &p);
    check(
        &mut checks,
        coef == ratio(27, 5) && coef == expected,
        format!("coefficient at (3, 1/8) = {coef}"),
    );
    let e = std::f64::consts::E;
    for (k, d, s) in [(20usize, 60usize, 10usize), (20, 63, 10), (20, 60, 9)] {
        let dk = (d * k) as f64;
        let reference = dk >= 2f64.powf(3.0 * e)
            && d as f64 <= 2f64.powf(k as f64 / 2.0) / (6.0 * e)
            && s as f64 >= dk.log2().min(k as f64 / 2.0);
        let got = prs_core::cnf::check_sharing_condition(k, d, s);
        check(
            &mut checks,
            got == reference,
            format!("sharing(k={k}, d={d}, s={s}) = {got}, reference {reference}"),
        );
    }
    Ok(checks)
}

fn c10_negative_control() -> Outcome {
    let mut checks = Vec::new();
    let config = UniformityConfig {
        seed: SEED,
        ..UniformityConfig::default()
    };
    for (name, instance, _) in uniformity_cases()? {
        let stub = BiasedStub::for_instance(&instance)?;
        let v = uniformity_test(&stub, &instance, N, &config)?;
        check(
            &mut checks,
            !v.pass,
            format!(
                "{name}: biased stub rejected (tv {:.4}, p {:.2e})",
                v.tv, v.p_value
            ),
        );
    }
    let v = run_preset("negative-control", N, SEED)?;
    check(
        &mut checks,
        !v.pass,
        format!("negative-control preset rejected (tv {:.4})", v.tv),
    );
    Ok(checks)
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact uniformity", c1_uniformity),
        ("exact expected work", c2_expected_work),
        ("q-machinery exactness", c3_q_exactness),
        ("first-round law", c4_first_round),
        ("resampling-set properties", c5_res_properties),
        ("path analytics", c6_path_analytics),
        ("efficiency regime", c7_efficiency),
        ("hard fixture", c8_hard_fixture),
        ("condition checkers", c9_checkers),
        ("negative control", c10_negative_control),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let id = format!("C{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| f == &id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        let (pass, lines) = match outcome {
            Ok(Ok(checks)) => (
                !checks.is_empty() && checks.iter().all(|(_, ok)| *ok),
                checks
                    .into_iter()
                    .map(|(label, ok)| {
                        format!("    [{}] {label}", if ok { "ok" } else { "FAILED" })
                    })
                    .collect(),
            ),
            Ok(Err(e)) => (false, vec![format!("    error: {e}")]),
            Err(_) => (false, vec!["    panicked".to_string()]),
        };
        println!(
            "{} {id} {title} ({secs:.1}s)",
            if pass { "PASS" } else { "FAIL" }
        );
        for line in lines {
            println!("{line}");
        }
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
