use prs_core::cnf::{
    check_extremal_condition, cnf_stats, hard_example, monotone_cnf_from_graph, parse_dimacs,
    sample_cnf, sink_free_cnf, CnfError, Width,
};
use prs_core::graph::encode::values_to_orientation;
use prs_core::graph::Graph;
use prs_core::rng::{derive_seed, rng_from_seed};
use prs_core::verify::{
    enumerate_valid, solution_counts, uniformity_from_samples, UniformityConfig,
};
use prs_core::{SamplerConfig, SamplerKind};

#[test]
fn sink_free_cnf_solutions_are_sink_free_orientations() {
    let graph = Graph::random_regular(10, 3, &mut rng_from_seed(8)).unwrap();
    let formula = sink_free_cnf(&graph);
    assert!(cnf_stats(&formula).extremal);
    for seed in 0..50 {
        let (solution, _) = sample_cnf(
            &formula,
            SamplerKind::ExtremalPrs,
            &SamplerConfig::default().with_seed(seed),
        )
        .unwrap();
        // true means the edge points to its larger endpoint, which is value 0
        let values: Vec<u32> = solution.iter().map(|&b| u32::from(!b)).collect();
        assert!(values_to_orientation(&values).is_sink_free(&graph));
    }
}

#[test]
fn solution_count_matches_sink_free_orientations() {
    // the 4-cycle has exactly two sink-free orientations
    let formula = sink_free_cnf(&Graph::cycle(4));
    assert_eq!(solution_counts(&formula).unwrap().0, 2);
}

#[test]
fn extremal_sampler_is_uniform_on_a_small_formula() {
    let formula = parse_dimacs("p cnf 4 3\n1 2 0\n-2 3 0\n-3 4 0\n").unwrap();
    assert!(cnf_stats(&formula).extremal);
    let instance = formula.to_instance();
    let oracle = enumerate_valid(&instance).unwrap();
    let samples: Vec<Vec<u32>> = (0..100_000)
        .map(|i| {
            let cfg = SamplerConfig::default().with_seed(derive_seed(3, i));
            let (s, _) = sample_cnf(&formula, SamplerKind::ExtremalPrs, &cfg).unwrap();
            s.into_iter().map(u32::from).collect()
        })
        .collect();
    let v = uniformity_from_samples(
        "extremal_prs",
        &oracle,
        &samples,
        &UniformityConfig::default(),
    );
    assert!(v.pass, "{v:?}");
}

#[test]
fn extremal_sampler_refuses_non_extremal_formula() {
    let formula = parse_dimacs("p cnf 3 2\n1 2 0\n2 3 0\n").unwrap();
    assert_eq!(
        sample_cnf(
            &formula,
            SamplerKind::ExtremalPrs,
            &SamplerConfig::default()
        ),
        Err(CnfError::NotExtremal)
    );
}

#[test]
fn hard_example_shape() {
    for m in 1..=4 {
        let f = hard_example(m);
        assert_eq!(f.num_vars, 3 * m);
        assert_eq!(f.num_clauses(), 4 * m);
        let s = cnf_stats(&f);
        assert!(s.extremal);
        assert_eq!(s.width, Width::Mixed);
    }
}

#[test]
fn monotone_construction_statistics() {
    let graph = Graph::random_regular(12, 3, &mut rng_from_seed(1)).unwrap();
    let m = monotone_cnf_from_graph(&graph, 4);
    assert!(m.regular);
    let s = cnf_stats(&m.formula);
    assert_eq!(s.width, Width::Uniform(8));
    assert_eq!(s.degree, 3);
    assert_eq!(s.intersection, Some(4));
    assert!(!s.extremal);
}

#[test]
fn extremal_condition_boundary() {
    // (d - 1) e k <= 2^k
    assert!(check_extremal_condition(10, 38));
    assert!(!check_extremal_condition(10, 40));
    assert!(!check_extremal_condition(3, 2));
}
