use dsgibbs::chain::{final_states, ChainParams};
use dsgibbs::geometry::{
    subsimplex_contains, Assertion, FeasibleThetaSet, Observations, SimplexPoint,
};
use dsgibbs::oracle::{
    lower_upper_from_oracle, sample_feasible_u, sample_uniform_simplex,
    stationary_endpoint_samples, DEFAULT_MAX_ATTEMPTS,
};
use dsgibbs::rng::SeedSplitter;
use dsgibbs::stats::{ks_one_sample, ks_two_sample, mean_with_error, proportion};
use dsgibbs::Error;
use rand::Rng;
use rand_distr::Exp1;

mod common;

fn binomial(n: u64, k: u64) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

#[test]
fn simplex_draws_have_dirichlet_marginals() {
    let mut rng = SeedSplitter::new(300).stream(0);
    let two: Vec<SimplexPoint> = (0..20_000)
        .map(|_| sample_uniform_simplex(2, &mut rng).unwrap())
        .collect();
    let first: Vec<f64> = two.iter().map(|p| p.coord(0)).collect();
    assert!(!ks_one_sample(&first, Ok).unwrap().rejects_at(0.001));

    let three: Vec<SimplexPoint> = (0..20_000)
        .map(|_| sample_uniform_simplex(3, &mut rng).unwrap())
        .collect();
    for j in 0..3 {
        let xs: Vec<f64> = three.iter().map(|p| p.coord(j)).collect();
        let ks = ks_one_sample(&xs, |x| Ok(1.0 - (1.0 - x).powi(2))).unwrap();
        assert!(!ks.rejects_at(0.001), "coordinate {j}: {ks:?}");
    }
    for p in two.iter().chain(&three) {
        assert!((p.coords().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn acceptance_formula_matches_integral() {
    // P(max of N1 uniforms <= min of N2 uniforms) = ∫ x^N1 · N2 (1 - x)^(N2 - 1) dx
    for n1 in 1..8u64 {
        for n2 in 1..=8 - n1 {
            let steps = 4000;
            let h = 1.0 / steps as f64;
            let f = |x: f64| x.powi(n1 as i32) * n2 as f64 * (1.0 - x).powi(n2 as i32 - 1);
            let integral: f64 = (0..steps)
                .map(|i| {
                    let l = i as f64 * h;
                    h / 6.0 * (f(l) + 4.0 * f(l + 0.5 * h) + f(l + h))
                })
                .sum();
            assert!(
                (integral - 1.0 / binomial(n1 + n2, n1)).abs() < 1e-12,
                "({n1},{n2})"
            );
        }
    }
}

#[test]
fn two_category_acceptance_rate() {
    let s = SeedSplitter::new(301);
    for n1 in 1..8usize {
        for n2 in 1..=8 - n1 {
            let obs = Observations::from_counts(&[n1, n2]).unwrap();
            let draws = stationary_endpoint_samples(
                &obs,
                3000,
                &s.derive((n1 * 10 + n2) as u64),
                DEFAULT_MAX_ATTEMPTS,
            )
            .unwrap();
            let rate = draws.acceptance_rate();
            let want = 1.0 / binomial((n1 + n2) as u64, n1 as u64);
            assert!(rate.within(want, 3.0), "({n1},{n2}): {rate:?} vs {want}");
        }
    }
}

#[test]
fn single_observation_is_always_accepted() {
    let mut rng = SeedSplitter::new(302).stream(0);
    for k in 2..=4 {
        for label in 0..k {
            let obs = Observations::new(vec![label], k).unwrap();
            for _ in 0..50 {
                assert_eq!(sample_feasible_u(&obs, &mut rng, 1).unwrap().attempts, 1);
            }
        }
    }
}

#[test]
fn three_category_acceptance_matches_independent_feasibility_estimate() {
    let obs = Observations::new(vec![0, 1, 2], 3).unwrap();
    let s = SeedSplitter::new(303);

    // Rejection run.
    let mut rng = s.stream(0);
    let (mut accepted, mut attempts) = (0u64, 0u64);
    for _ in 0..4000 {
        attempts += sample_feasible_u(&obs, &mut rng, DEFAULT_MAX_ATTEMPTS)
            .unwrap()
            .attempts;
        accepted += 1;
    }
    let rate = proportion(accepted, attempts);

    // Independent configurations from separately generated Dirichlet draws,
    // judged feasible by planar vertex enumeration.
    let mut rng = s.stream(1);
    let trials = 20_000u64;
    let mut hits = 0u64;
    for _ in 0..trials {
        let us: Vec<SimplexPoint> = (0..3)
            .map(|_| {
                let w: Vec<f64> = (0..3).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                let total: f64 = w.iter().sum();
                SimplexPoint::new(w.iter().map(|x| x / total).collect()).unwrap()
            })
            .collect();
        if !common::polygon_vertices(&common::half_planes(&us, &obs)).is_empty() {
            hits += 1;
        }
    }
    let direct = proportion(hits, trials);
    let se = rate.std_error.hypot(direct.std_error);
    assert!(
        (rate.estimate - direct.estimate).abs() <= 3.0 * se,
        "rejection {rate:?} vs enumeration {direct:?}"
    );
}

#[test]
fn accepted_configurations_contain_interval_endpoints() {
    let mut rng = SeedSplitter::new(304).stream(0);
    let obs = Observations::new(vec![0, 1, 0, 1, 1], 2).unwrap();
    for _ in 0..500 {
        let draw = sample_feasible_u(&obs, &mut rng, DEFAULT_MAX_ATTEMPTS).unwrap();
        let FeasibleThetaSet::Interval(iv) = draw.feasible else {
            panic!("two categories give intervals");
        };
        assert!(!iv.is_empty());
        for x in [iv.lo, iv.hi, 0.5 * (iv.lo + iv.hi)] {
            let theta = SimplexPoint::from_weights(vec![x, 1.0 - x]).unwrap();
            for (u, &k) in draw.us.iter().zip(obs.labels()) {
                assert!(
                    subsimplex_contains(&theta, k, u).unwrap(),
                    "theta={x} k={k} u={u:?}"
                );
            }
        }
    }
}

#[test]
fn endpoints_follow_shifted_beta() {
    let obs = Observations::from_counts(&[1, 1]).unwrap();
    let draws =
        stationary_endpoint_samples(&obs, 100_000, &SeedSplitter::new(305), DEFAULT_MAX_ATTEMPTS)
            .unwrap();
    // Beta(2, 1) has cdf x^2.
    let ks = ks_one_sample(&draws.values, |x| Ok(x * x)).unwrap();
    assert!(!ks.rejects_at(0.001), "{ks:?}");
    assert!(mean_with_error(&draws.values).within(2.0 / 3.0, 4.0));
}

#[test]
fn endpoints_match_chain_output() {
    let s = SeedSplitter::new(306);
    for (n1, n2) in [(1u32, 1u32), (3, 2)] {
        let obs = Observations::from_counts(&[n1 as usize, n2 as usize]).unwrap();
        let oracle =
            stationary_endpoint_samples(&obs, 20_000, &s.derive(n1 as u64), DEFAULT_MAX_ATTEMPTS)
                .unwrap();
        let p = ChainParams::new(n1, n2).unwrap();
        let chain = final_states(p, 0.0, 200, 20_000, s.derive(100 + n1 as u64).seed()).unwrap();
        let ks = ks_two_sample(&oracle.values, &chain).unwrap();
        assert!(!ks.rejects_at(0.001), "({n1},{n2}): {ks:?}");
    }
}

#[test]
fn lower_upper_for_one_observation_each() {
    // The feasible interval is the pair of order statistics of two uniforms,
    // so P(lo >= 1/2) = 1/4 and P(hi >= 1/2) = 3/4.
    let obs = Observations::from_counts(&[1, 1]).unwrap();
    let assertion = Assertion::new(0, 0.5, 1.0).unwrap();
    let first =
        lower_upper_from_oracle(&obs, &assertion, 20_000, &SeedSplitter::new(307), 1_000_000)
            .unwrap()
            .probabilities;
    let rerun =
        lower_upper_from_oracle(&obs, &assertion, 20_000, &SeedSplitter::new(308), 1_000_000)
            .unwrap()
            .probabilities;
    for lu in [first, rerun] {
        assert!(lu.lower_estimate().within(0.25, 3.0), "{lu:?}");
        assert!(lu.upper_estimate().within(0.75, 3.0), "{lu:?}");
    }
    let se = first
        .lower_estimate()
        .std_error
        .hypot(rerun.lower_estimate().std_error);
    assert!((first.lower - rerun.lower).abs() <= 3.0 * se);

    let whole = lower_upper_from_oracle(
        &obs,
        &Assertion::new(0, 0.0, 1.0).unwrap(),
        1000,
        &SeedSplitter::new(309),
        1_000_000,
    )
    .unwrap()
    .probabilities;
    assert_eq!((whole.lower, whole.upper), (1.0, 1.0));
}

#[test]
fn oracle_probabilities_grow_with_the_assertion() {
    let obs = Observations::new(vec![0, 1, 2, 0], 3).unwrap();
    let splitter = SeedSplitter::new(310);
    let mut prev = (0.0, 0.0);
    for (lo, hi) in [(0.4, 0.5), (0.3, 0.6), (0.1, 0.9), (0.0, 1.0)] {
        // Same splitter, so every assertion is judged on the same configurations.
        let lu = lower_upper_from_oracle(
            &obs,
            &Assertion::new(0, lo, hi).unwrap(),
            2000,
            &splitter,
            DEFAULT_MAX_ATTEMPTS,
        )
        .unwrap()
        .probabilities;
        assert!(lu.lower <= lu.upper);
        assert!(
            lu.lower >= prev.0 && lu.upper >= prev.1,
            "{lu:?} after {prev:?}"
        );
        prev = (lu.lower, lu.upper);
    }
}

#[test]
fn exhausted_budget_reports_rate() {
    let obs = Observations::from_counts(&[6, 6]).unwrap();
    let err = stationary_endpoint_samples(&obs, 10, &SeedSplitter::new(311), 50).unwrap_err();
    match err {
        Error::SamplingBudget { max_attempts, .. } => assert_eq!(max_attempts, 50),
        other => panic!("unexpected {other}"),
    }
    let many = Observations::new(vec![0, 1, 2, 0, 1, 2, 0], 3).unwrap();
    let mut rng = SeedSplitter::new(312).stream(0);
    assert!(matches!(
        sample_feasible_u(&many, &mut rng, 10),
        Err(Error::Domain(_))
    ));
}
