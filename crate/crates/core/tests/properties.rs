mod common;

use collapse_core::hilbert::{born_probability, collapse_onto, commutator, measure, Operator, StateVector};
use collapse_core::protocols::random::{random_commuting_pair, random_generic_pair, random_state};
use collapse_core::protocols::{
    ensemble_success, receiver_marginal, run_protocol1, two_level, Protocol1Params,
};
use collapse_core::rng::trial_stream;
use collapse_core::{DetectionWindow, GaussianPacket};
use num_complex::Complex64;
use proptest::prelude::*;

fn arb_state(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(move |v| {
            StateVector::new(
                v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(),
                StateVector::numbered_labels(dim),
            )
            .unwrap()
        })
}

/// Projector onto the span of a random subset of a random basis.
fn arb_projector(dim: usize) -> impl Strategy<Value = Operator> {
    any::<u64>().prop_map(move |seed| {
        let mut rng = trial_stream(seed, 0);
        random_commuting_pair(dim, &mut rng).unwrap().0
    })
}

/// Oracle for the sender-then-receiver marginal: sample-free branch walk
/// through normalized collapsed states.
fn marginal_by_branches(s: &StateVector, a: &Operator, b: &Operator) -> f64 {
    [a.clone(), a.complement()]
        .iter()
        .filter_map(|branch| collapse_onto(s, branch).unwrap())
        .map(|(p, post)| p * born_probability(b, &post).unwrap())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projectors_are_hermitian_and_idempotent(s in arb_state(3)) {
        let p = Operator::projector_onto(&s);
        prop_assert!(p.idempotence_defect() < 1e-12);
        prop_assert!(p.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn completeness(s in arb_state(4), p in arb_projector(4)) {
        let total = p.expectation(&s).unwrap() + p.complement().expectation(&s).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branches_are_normalized_and_repeatable(s in arb_state(3), p in arb_projector(3), seed in any::<u64>()) {
        let prob = born_probability(&p, &s).unwrap();
        prop_assume!(prob > 1e-6 && prob < 1.0 - 1e-6);
        let mut rng = trial_stream(seed, 0);
        for _ in 0..4 {
            let first = measure(&s, &p, &mut rng).unwrap();
            prop_assert!((first.post_state.norm() - 1.0).abs() < 1e-12);
            let second = measure(&first.post_state, &p, &mut rng).unwrap();
            prop_assert_eq!(first.fired, second.fired);
            prop_assert!((second.probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_routes_agree(seed in any::<u64>(), dim in 2usize..5) {
        let mut rng = trial_stream(seed, 1);
        let (a, b) = random_generic_pair(dim, &mut rng).unwrap();
        let s = random_state(dim, &mut rng).unwrap();
        let direct = receiver_marginal(&s, Some(&a), &b).unwrap();
        prop_assert!((direct - marginal_by_branches(&s, &a, &b)).abs() < 1e-12);
    }

    #[test]
    fn commuting_pairs_preserve_receiver_marginal(seed in any::<u64>(), dim in 2usize..6) {
        let mut rng = trial_stream(seed, 2);
        let (a, b) = random_commuting_pair(dim, &mut rng).unwrap();
        let s = random_state(dim, &mut rng).unwrap();
        prop_assert!(commutator(&a, &b).unwrap().frobenius_norm() < 1e-12);
        let with = marginal_by_branches(&s, &a, &b);
        let without = born_probability(&b, &s).unwrap();
        prop_assert!((with - without).abs() < 1e-12);
    }

    #[test]
    fn detection_independent_of_momentum(sigma_bar in 1.0f64..500.0, d in -200.0f64..200.0, k in 0.01f64..50.0, sigma in 0.05f64..5.0) {
        let w = DetectionWindow::new(d, k).unwrap();
        let unit = 1.0 / (sigma * std::f64::consts::SQRT_2);
        let reference = GaussianPacket::position(sigma_bar, 0.0).unwrap().detection_probability(&w).unwrap();
        for m in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            let p = GaussianPacket::position(sigma_bar, m * unit).unwrap().detection_probability(&w).unwrap();
            prop_assert!((p - reference).abs() < 1e-12);
        }
    }

    #[test]
    fn uncertainty_is_saturated(sigma in 1e-4f64..1e4) {
        let p = GaussianPacket::position(sigma, 0.0).unwrap();
        prop_assert!((p.uncertainty_product() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn monte_carlo_matches_born_rule() {
    let mut rng = trial_stream(17, 0);
    for case in 0..10u64 {
        let dim = 2 + (case as usize % 3);
        let (p, _) = random_generic_pair(dim, &mut rng).unwrap();
        let s = random_state(dim, &mut rng).unwrap();
        let prob = born_probability(&p, &s).unwrap();
        let n = 20_000u64;
        let mut draws = trial_stream(1000 + case, 0);
        let fired = (0..n).filter(|_| measure(&s, &p, &mut draws).unwrap().fired).count();
        let freq = fired as f64 / n as f64;
        let band = 4.0 * (prob * (1.0 - prob) / n as f64).sqrt();
        assert!((freq - prob).abs() <= band.max(1e-12), "case {case}: {freq} vs {prob}");
    }
}

#[test]
fn closed_form_detection_matches_quadrature() {
    let mut rng = trial_stream(2718, 0);
    use rand::Rng;
    for _ in 0..50 {
        let sigma_bar: f64 = rng.random_range(0.5..200.0);
        let d = rng.random_range(-6.0..6.0) * sigma_bar;
        let k = rng.random_range(0.01..2.0) * sigma_bar;
        let w = DetectionWindow::new(d, k).unwrap();
        let closed = GaussianPacket::position(sigma_bar, 0.0).unwrap().detection_probability(&w).unwrap();
        let oracle = common::window_quadrature(sigma_bar, d, k);
        assert!((closed - oracle).abs() < 1e-9, "σ̄={sigma_bar} d={d} k={k}: {closed} vs {oracle}");
    }
}

#[test]
fn detection_grows_with_spreading() {
    for (d, k) in [(100.0, 1.0), (10.0, 2.5), (1.0, 0.5), (50.0, 45.0)] {
        let w = DetectionWindow::new(d, k).unwrap();
        let mut last = 0.0;
        let steps = 400;
        for i in 1..steps {
            let sigma_bar = d * i as f64 / steps as f64;
            let p = GaussianPacket::position(sigma_bar, 0.0).unwrap().detection_probability(&w).unwrap();
            if last > 0.0 {
                assert!(p > last, "d={d} k={k} σ̄={sigma_bar}: {p} <= {last}");
            }
            last = p;
        }
        assert!(last > 0.0);
    }
}

#[test]
fn fourier_consistency_matrix() {
    for sigma in [0.5, 1.0, 2.0, 10.0] {
        for lambda in [-3.0, 0.0, 3.0] {
            let packet = GaussianPacket::position(sigma, lambda).unwrap();
            let grid = packet.to_default_grid().unwrap();
            let analytic = packet.fourier();
            let err = grid.fourier().unwrap().l2_distance(|p| analytic.amplitude(p));
            assert!(err < 1e-8, "σ={sigma} λ={lambda}: {err}");
        }
    }
}

#[test]
fn ensemble_matches_enumeration() {
    for n in 1..=12 {
        assert_eq!(ensemble_success(n), common::ensemble_by_enumeration(n), "n={n}");
    }
    let single = receiver_marginal(&two_level::ket_a(), Some(&two_level::projector_plus()), &two_level::projector_b()).unwrap();
    assert!((single - 0.5).abs() < 1e-15);
}

#[test]
fn protocol1_seed_matrix() {
    for seed in [1u64, 2, 3, 42, 1234] {
        let r = run_protocol1(&Protocol1Params { n_trials: 20_000, sender_acts: true, n_particles: 1, seed }).unwrap();
        assert!((r.empirical_p_receiver - r.analytic_p_receiver).abs() <= r.confidence_halfwidth, "seed {seed}");
    }
}
