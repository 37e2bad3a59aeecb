#![allow(clippy::needless_range_loop)]

use mi_sco_core::infotheory::*;
use proptest::prelude::*;

fn weights(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter("positive mass", |w| w.iter().sum::<f64>() > 1e-6)
}

fn pmf_pair() -> impl Strategy<Value = (FinitePmf, FinitePmf)> {
    (1usize..=16).prop_flat_map(|n| {
        (prop::collection::vec(0.0f64..1.0, n), prop::collection::vec(0.001f64..1.0, n)).prop_filter_map(
            "positive mass",
            |(a, b)| Some((FinitePmf::from_weights(&a).ok()?, FinitePmf::from_weights(&b).ok()?)),
        )
    })
}

fn joint() -> impl Strategy<Value = JointPmf> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(nx, ny)| {
        weights(nx * ny..=nx * ny).prop_map(move |w| {
            let s: f64 = w.iter().sum();
            JointPmf::from_table(nx, ny, w.iter().map(|v| v / s).collect()).unwrap()
        })
    })
}

fn triple() -> impl Strategy<Value = TriplePmf> {
    (1usize..=4, 1usize..=4, 1usize..=4).prop_flat_map(|(nx, ny, nz)| {
        weights(nx * ny * nz..=nx * ny * nz).prop_map(move |w| {
            let s: f64 = w.iter().sum();
            TriplePmf::new(nx, ny, nz, w.iter().map(|v| v / s).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn divergences_are_nonnegative((p, q) in pmf_pair()) {
        prop_assert!(kl_divergence(&p, &q).unwrap() >= -1e-12);
        let tv = total_variation(&p, &q).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&tv));
    }

    #[test]
    fn pinsker_holds((p, q) in pmf_pair()) {
        prop_assert!(pinsker_slack(&p, &q).unwrap() >= -1e-12);
    }

    #[test]
    fn coupling_is_optimal((p, q) in pmf_pair()) {
        let c = optimal_coupling(&p, &q).unwrap();
        let tv = total_variation(&p, &q).unwrap();
        prop_assert!((disagreement_probability(&c).unwrap() - tv).abs() < 1e-12);
        for (a, b) in c.x_marginal().probs().iter().zip(p.probs()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in c.y_marginal().probs().iter().zip(q.probs()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mutual_information_forms_agree(j in joint()) {
        let a = mutual_information(&j);
        let b = mutual_information_kl_form(&j);
        let c = mutual_information(&j.transpose());
        prop_assert!(a >= -1e-12);
        prop_assert!((a - b).abs() < 1e-10);
        prop_assert!((a - c).abs() < 1e-10);
        let cap = entropy(&j.x_marginal()).min(entropy(&j.y_marginal()));
        prop_assert!(a <= cap + 1e-10);
    }

    #[test]
    fn data_processing(j in joint(), modulus in 1usize..4) {
        let g = j.map_x(modulus, |i| i % modulus).unwrap();
        prop_assert!(mutual_information(&g) <= mutual_information(&j) + 1e-12);
    }

    #[test]
    fn chain_rule(t in triple()) {
        let lhs = mutual_information(&t.xz_y_joint());
        let rhs = mutual_information(&t.zy_marginal()) + conditional_mutual_information(&t);
        prop_assert!((lhs - rhs).abs() < 1e-10);
        let slices = conditional_mutual_information_by_slices(&t);
        prop_assert!((slices - conditional_mutual_information(&t)).abs() < 1e-10);
        prop_assert!(conditional_mutual_information(&t) >= -1e-12);
    }

    #[test]
    fn dump_round_trip((p, _q) in pmf_pair()) {
        let back = FinitePmf::parse_dump(&p.dump()).unwrap();
        for (a, b) in back.probs().iter().zip(p.probs()) {
            prop_assert!((a - b).abs() <= 1e-15 * b.max(1e-300) + 1e-300);
        }
    }
}

#[test]
fn conditional_mi_examples() {
    // X ⟂ Y given Z: product slices.
    let mut table = Vec::new();
    let (px, py) = ([0.3, 0.7], [0.6, 0.4]);
    for x in 0..2 {
        for y in 0..2 {
            for _z in 0..2 {
                table.push(px[x] * py[y] * 0.5);
            }
        }
    }
    let t = TriplePmf::new(2, 2, 2, table).unwrap();
    assert!(conditional_mutual_information(&t).abs() < 1e-12);

    // X = Y = Z uniform bit.
    let mut table = vec![0.0; 8];
    table[0] = 0.5;
    table[7] = 0.5;
    let t = TriplePmf::new(2, 2, 2, table).unwrap();
    assert!(conditional_mutual_information(&t).abs() < 1e-12);

    // Z constant reduces to the plain MI.
    let j = JointPmf::from_table(2, 2, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
    let t = TriplePmf::new(2, 2, 1, j.table().to_vec()).unwrap();
    assert!((conditional_mutual_information(&t) - mutual_information(&j)).abs() < 1e-12);
}
