use mi_sco_core::bounds::*;
use mi_sco_core::learners::*;
use mi_sco_core::parallel::{trial_rng, Execution, MonteCarlo};
use mi_sco_core::sco::*;
use proptest::prelude::*;

#[test]
fn closed_form_lemma_values() {
    assert_eq!(corbounded_mi_lower_bound(0.0), 0.0);
    assert_eq!(corbounded_mi_lower_bound(1.0), 0.125);
    assert_eq!(corbounded_mi_lower_bound(0.5), 1.0 / 128.0);

    let oracle = (1.0 / (192.0 * 2f64.sqrt() * 20.0 * 2f64.ln())).powi(2);
    let v = subgaussian_mi_lower_bound(1.0, 1.0);
    assert!((v - oracle).abs() < 1e-20);
    assert!((v - 7.06e-8).abs() < 0.01e-8);
    assert_eq!(subgaussian_mi_lower_bound(0.0, 1.0), 0.0);
    assert!(subgaussian_mi_lower_bound(1e-200, 1.0) < 1e-300);

    assert_eq!(xu_bound(0.0, 5, 4.0).unwrap(), 0.0);
    let v = xu_bound(1.5 * 2f64.ln(), 2, 4.0).unwrap();
    assert!((v - 4.0787).abs() < 1e-4);
    assert!(xu_bound(-1.0, 2, 4.0).is_err());
    assert_eq!(cmi_generalization_bound(0.0, 3, 4.0).unwrap(), 0.0);
    assert_eq!(gm(0.0, 4), 0.0);
}

#[test]
fn gm_matches_the_subgaussian_bound() {
    for m in [1, 4, 25] {
        for a in [0.01, 0.3, 1.0, 7.5, 100.0] {
            let direct = gm(a, m);
            let via = subgaussian_mi_lower_bound(a, 2.0 * (m as f64).sqrt());
            assert!((direct - via).abs() <= 1e-12 * direct.max(1e-300), "m={m} a={a}");
        }
    }
}

#[test]
fn gm_is_monotone_and_convex_on_its_domain() {
    for m in [1usize, 4, 16, 100] {
        let top = 0.999 * gm_domain_limit(m);
        let grid: Vec<f64> = (0..1000).map(|i| top * i as f64 / 999.0).collect();
        let vals: Vec<f64> = grid.iter().map(|&a| gm(a, m)).collect();
        for w in vals.windows(2) {
            assert!(w[0] <= w[1], "m={m}");
        }
        for w in vals.windows(3) {
            assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-12, "m={m}");
        }
        assert_eq!(gm(1.001 * gm_domain_limit(m), m), 0.0);
    }
}

#[test]
fn paley_zygmund_examples() {
    let r = paley_zygmund_check(&[3.0], &[1.0], 0.5).unwrap();
    assert_eq!((r.lhs, r.rhs, r.holds), (1.0, 0.25, true));
    let r = paley_zygmund_check(&[0.0, 1.0], &[0.5, 0.5], 0.5).unwrap();
    assert_eq!(r.lhs, 0.5);
    assert!((r.rhs - 0.125).abs() < 1e-15);
    let r = paley_zygmund_check(&[-1.0, 2.0], &[0.5, 0.5], 0.5).unwrap();
    assert!(!r.hypothesis_ok);
    assert!(paley_zygmund_check(&[1.0], &[1.0], 1.0).is_err());

    for (m, eps) in [(1, 0.01), (4, 0.018), (64, 1e-4)] {
        let r = concentration_constant_check(m, eps);
        assert!(r.holds);
        assert!((pz_good_fraction(m, eps) - 1.0 / (4.0 * 2916.0 * m as f64 * eps)).abs() < 1e-15 * pz_good_fraction(m, eps));
    }
}

#[test]
fn bounded_lemma_on_random_joints() {
    for i in 0..1000 {
        let j = random_bounded_joint(&mut trial_rng(40, 0, i));
        let r = verify_bounded_lemma(&j);
        assert!(r.hypothesis_ok && r.holds, "{r:?}");
    }
}

#[test]
fn subgaussian_lemma_on_constructed_joints() {
    for i in 0..200 {
        let (j, c) = random_rademacher_joint(&mut trial_rng(41, 0, i));
        let r = verify_subgaussian_lemma(&j, c);
        assert!(r.hypothesis_ok && r.holds, "{r:?}");
    }
}

#[test]
fn fingerprint_lemma_by_quadrature() {
    let ests = [
        Estimator::Zero,
        Estimator::Constant(1.0 / 3.0),
        Estimator::Constant(-1.0 / 3.0),
        Estimator::ClippedMean,
        Estimator::Sign,
    ];
    for m in 1..=QUADRATURE_MAX_M {
        for est in ests {
            let r = fingerprint_expectation(est, m, FingerprintMode::Quadrature { nodes: 64 }).unwrap();
            assert!(r.holds, "{r:?}");
            if est == Estimator::Zero {
                assert!((r.lhs - 1.0 / 27.0).abs() < 1e-9);
            }
        }
    }
    assert!(fingerprint_expectation(Estimator::Zero, 13, FingerprintMode::Quadrature { nodes: 64 }).is_err());
}

#[test]
fn fingerprint_quadrature_agrees_with_monte_carlo() {
    for m in [1, 5] {
        let q = fingerprint_expectation(Estimator::ClippedMean, m, FingerprintMode::Quadrature { nodes: 64 }).unwrap();
        let mc = fingerprint_monte_carlo(Estimator::ClippedMean, m, 200_000, 5, Execution::Parallel).unwrap();
        assert!((q.lhs - mc.lhs).abs() < 4.0 * mc.ci_halfwidth / 3.0, "m={m}");
    }
}

fn xu_menu() -> Vec<LearnerSpec> {
    vec![
        LearnerSpec::Mean,
        LearnerSpec::QuantizedMean { delta: 0.25 },
        LearnerSpec::EpsilonNetErm,
        LearnerSpec::Sgd,
        LearnerSpec::RegularizedErm { lambda: 0.3 },
        LearnerSpec::Subsample { k: 1, base: Box::new(LearnerSpec::Mean) },
        randomized_response(LearnerSpec::Mean, 0.5).unwrap(),
        LearnerSpec::Constant(vec![]),
    ]
}

#[test]
fn xu_bound_on_small_instances() {
    for d in 1..=3 {
        for m in 1..=4 {
            for p in [-1.0 / 3.0, 0.0, 0.15] {
                let inst = HardInstance::new(vec![p; d]).unwrap();
                for spec in xu_menu() {
                    let spec = match spec {
                        LearnerSpec::Constant(_) => LearnerSpec::Constant(vec![0.1; d]),
                        s => s,
                    };
                    let r = xu_check(&spec.compile(d, m).unwrap(), &inst).unwrap();
                    assert!(r.holds, "{} d={d} m={m} p={p}: {r:?}", spec.name());
                }
            }
        }
    }
}

#[test]
fn xu_bound_for_net_erm_over_bias_grid() {
    let learner = LearnerSpec::EpsilonNetErm.compile(2, 4).unwrap();
    let grid = [-1.0 / 3.0, -1.0 / 6.0, 0.0, 1.0 / 6.0, 1.0 / 3.0];
    for a in grid {
        for b in grid {
            let inst = HardInstance::new(vec![a, b]).unwrap();
            assert!(xu_check(&learner, &inst).unwrap().holds);
        }
    }
}

#[test]
fn gap_identity_on_channels() {
    // E[Δ_S] = E[Δ_D] − gap + (1 − ‖p‖²/d)/m for every learner.
    let inst = HardInstance::new(vec![0.2, -0.1]).unwrap();
    for spec in [LearnerSpec::EpsilonNetErm, LearnerSpec::QuantizedMean { delta: 0.3 }, LearnerSpec::Sgd] {
        let ch = exact_channel(&spec.compile(2, 4).unwrap(), &inst).unwrap();
        let lhs = ch.expected_empirical_suboptimality();
        let rhs = ch.expected_suboptimality() - ch.expected_gap() + inst.mean_estimator_risk(4);
        assert!((lhs - rhs).abs() < 1e-10, "{}", spec.name());
    }
}

#[test]
fn chain_rule_on_factorized_and_joint_learners() {
    let inst = HardInstance::new(vec![0.1, -0.2, 0.3]).unwrap();
    for spec in [LearnerSpec::QuantizedMean { delta: 0.2 }, LearnerSpec::Mean, LearnerSpec::EpsilonNetErm] {
        let learner = spec.compile(3, 3).unwrap();
        let ch = exact_channel(&learner, &inst).unwrap();
        let r = chain_rule_decomposition(&ch, learner.is_coordinate_factorized()).unwrap();
        assert!(r.holds, "{}: {r:?}", spec.name());
    }
}

#[test]
fn cmi_is_capped_by_selector_entropy() {
    for (d, m) in [(1, 1), (1, 2), (1, 3), (2, 2), (1, 4)] {
        let inst = HardInstance::new(vec![0.1; d]).unwrap();
        for spec in [LearnerSpec::Mean, LearnerSpec::EpsilonNetErm, LearnerSpec::QuantizedMean { delta: 0.5 }] {
            let l = spec.compile(d, m).unwrap();
            let cmi = cmi_exact(&l, &inst, 1 << 24, Execution::Parallel).unwrap();
            assert!(cmi >= 0.0 && cmi <= m as f64 * 2f64.ln() + 1e-9);
            let ch = exact_channel(&l, &inst).unwrap();
            assert!(ch.expected_gap() <= cmi_generalization_bound(cmi, m, LOSS_RANGE).unwrap() + 1e-12);
        }
        if m >= 2 {
            let sub = LearnerSpec::Subsample { k: 1, base: Box::new(LearnerSpec::Mean) }.compile(d, m).unwrap();
            assert!(cmi_exact(&sub, &inst, 1 << 24, Execution::Sequential).unwrap() <= 2f64.ln() + 1e-9);
        }
    }
}

#[test]
fn cmi_monte_carlo_matches_exact() {
    let inst = HardInstance::new(vec![0.2, -0.2]).unwrap();
    let l = LearnerSpec::Mean.compile(2, 2).unwrap();
    let exact = cmi_exact(&l, &inst, 1 << 24, Execution::Parallel).unwrap();
    let est = cmi_monte_carlo(&l, &inst, &MonteCarlo::new(50_000, 3)).unwrap();
    assert!((est.mean - exact).abs() < 4.0 * est.std_error);
}

#[test]
fn bound_reports_serialize_stably() {
    let r = BoundReport::at_most("x", 0.5, 1.0, 0.0).with_dims(2, 3).with_epsilon(0.01).with_seed(9);
    let csv = reports_to_csv(&[r]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), BoundReport::CSV_HEADER);
    assert_eq!(lines.next().unwrap().split(',').count(), 11);
}

proptest! {
    #[test]
    fn subgaussian_bound_is_monotone(b1 in 1e-4f64..1.0, b2 in 1e-4f64..1.0, c in 0.5f64..10.0) {
        let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
        prop_assert!(subgaussian_mi_lower_bound(lo, c) <= subgaussian_mi_lower_bound(hi, c));
        prop_assert!(subgaussian_mi_lower_bound(lo, c * 1.5) <= subgaussian_mi_lower_bound(lo, c));
    }

    #[test]
    fn rademacher_joints_are_certified(n in 1usize..12, a in 0.05f64..1.0, shift in -2.0f64..2.0, eta in 0.0f64..0.5) {
        let (j, c) = rademacher_joint(n, a, shift, eta).unwrap();
        prop_assert!(j.tail_ratio(c) <= 1.0 + 1e-12);
        prop_assert!(j.mean_x().abs() < 1e-12);
        let r = verify_subgaussian_lemma(&j, c);
        prop_assert!(r.holds);
    }

    #[test]
    fn fingerprint_statistic_has_nonnegative_square(f in -1.0f64/3.0..1.0/3.0, p in -0.99f64..0.99, bits in any::<u8>()) {
        let xs: Vec<i8> = (0..8).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
        let v = fingerprint_statistic(f, p, &xs).unwrap();
        let cross = fingerprint_factor(p) * (f - p) * xs.iter().map(|&x| x as f64 - p).sum::<f64>();
        prop_assert!((v - cross - (f - p).powi(2)).abs() < 1e-12);
    }
}
