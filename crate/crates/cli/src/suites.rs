//! Randomised property suites over the information-theoretic primitives and the
//! correlation lemmas. Each suite returns one aggregated report carrying the
//! worst case.

use rand::seq::SliceRandom;
use rand::Rng;

use mi_sco_core::bounds::{
    gm, gm_domain_limit, paley_zygmund_check, random_bounded_joint, random_rademacher_joint, verify_bounded_lemma,
    verify_subgaussian_lemma, BoundReport,
};
use mi_sco_core::infotheory::{
    corner_coupling, disagreement_probability, kl_divergence, optimal_coupling, total_variation, FinitePmf, JointPmf,
};
use mi_sco_core::parallel::{map_indexed, trial_rng, Execution};
use mi_sco_core::{Error, Result};

const PINSKER_STREAM: u64 = 0x7069_6e73;
const COUPLING_STREAM: u64 = 0x636f_7570;
const BOUNDED_STREAM: u64 = 0x6c65_6d34;
const SUBGAUSSIAN_STREAM: u64 = 0x6c65_6d32;

/// Random coupling trials per distribution pair.
pub const COUPLINGS_PER_PAIR: usize = 8;

/// Collapse per-case reports into one: the entry with the smallest slack, renamed,
/// holding only if every case holds.
pub fn worst_case(name: &str, reports: Vec<BoundReport>) -> BoundReport {
    let n = reports.len();
    let failures = reports.iter().filter(|r| !r.holds).count();
    let hypothesis = reports.iter().filter(|r| !r.hypothesis_ok).count();
    let worst = reports
        .into_iter()
        .min_by(|a, b| a.slack.total_cmp(&b.slack))
        .unwrap_or_else(|| BoundReport::flag(name, false).with_note("empty suite"));
    let mut r = BoundReport::new(name, worst.lhs, worst.rhs, worst.direction, worst.tolerance);
    r.d = worst.d;
    r.m = worst.m;
    r.trials = n as u64;
    r = r.with_note(format!("{failures} of {n} cases violated"));
    if failures > 0 {
        r = r.require(false, "at least one case failed");
    }
    if hypothesis > 0 {
        r = r.hypothesis_violated(format!("{hypothesis} cases violated a hypothesis"));
    }
    r
}

/// A random pmf on `n` outcomes; roughly a fifth of the entries are zero.
pub fn random_pmf<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FinitePmf {
    let skew = if rng.gen_bool(0.5) { 1 } else { 3 };
    let mut w: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>().powi(skew) }).collect();
    if w.iter().all(|&x| x == 0.0) {
        let i = rng.gen_range(0..n);
        w[i] = 1.0;
    }
    FinitePmf::from_weights(&w).expect("positive mass")
}

pub fn random_pmf_pair<R: Rng + ?Sized>(rng: &mut R) -> (FinitePmf, FinitePmf) {
    let n = rng.gen_range(1..=16);
    (random_pmf(rng, n), random_pmf(rng, n))
}

/// `TV ≤ √(KL/2)` on random pairs over alphabets of size at most 16.
pub fn pinsker_suite(cases: usize, seed: u64, exec: Execution) -> Result<BoundReport> {
    let reports = map_indexed(cases, exec, |i| -> Result<BoundReport> {
        let (p, q) = random_pmf_pair(&mut trial_rng(seed, PINSKER_STREAM, i as u64));
        let tv = total_variation(&p, &q)?;
        let kl = kl_divergence(&p, &q)?;
        Ok(BoundReport::at_most("pinsker", tv, (kl / 2.0).sqrt(), 1e-12))
    });
    Ok(worst_case("pinsker_suite", reports.into_iter().collect::<Result<_>>()?))
}

/// Mix a few corner-rule couplings with random weights; the result stays feasible.
fn random_coupling<R: Rng + ?Sized>(rng: &mut R, p: &FinitePmf, q: &FinitePmf) -> Result<JointPmf> {
    let n = p.len();
    let pieces = rng.gen_range(1..=3);
    let mut table = vec![0.0; n * n];
    let weights: Vec<f64> = (0..pieces).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let mut o1: Vec<usize> = (0..n).collect();
        let mut o2: Vec<usize> = (0..n).collect();
        o1.shuffle(rng);
        o2.shuffle(rng);
        let c = corner_coupling(p, q, &o1, &o2)?;
        for (t, v) in table.iter_mut().zip(c.table()) {
            *t += w / total * v;
        }
    }
    JointPmf::new(p.outcomes().to_vec(), q.outcomes().to_vec(), table)
}

fn max_marginal_error(c: &JointPmf, p: &FinitePmf, q: &FinitePmf) -> f64 {
    let ex = c.x_marginal().probs().iter().zip(p.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ey = c.y_marginal().probs().iter().zip(q.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ex.max(ey)
}

/// The maximal coupling's disagreement equals TV, its marginals are exact, and
/// no random feasible coupling disagrees less.
pub fn coupling_suite(cases: usize, seed: u64, exec: Execution) -> Result<Vec<BoundReport>> {
    let rows = map_indexed(cases, exec, |i| -> Result<[BoundReport; 3]> {
        let mut rng = trial_rng(seed, COUPLING_STREAM, i as u64);
        let (p, q) = random_pmf_pair(&mut rng);
        let tv = total_variation(&p, &q)?;
        let opt = optimal_coupling(&p, &q)?;
        let dis = disagreement_probability(&opt)?;
        let exact = BoundReport::at_most("coupling_tv", (dis - tv).abs(), 0.0, 1e-12);
        let marg = BoundReport::at_most("coupling_marginals", max_marginal_error(&opt, &p, &q), 0.0, 1e-12);
        let mut best_other = f64::INFINITY;
        for _ in 0..COUPLINGS_PER_PAIR {
            let c = random_coupling(&mut rng, &p, &q)?;
            if max_marginal_error(&c, &p, &q) > 1e-12 {
                return Err(Error::InvalidPmf("random coupling left the transport polytope".into()));
            }
            best_other = best_other.min(disagreement_probability(&c)?);
        }
        let optimal = BoundReport::at_least("coupling_optimality", best_other, dis, 1e-12);
        Ok([exact, marg, optimal])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut by_kind: [Vec<BoundReport>; 3] = Default::default();
    for row in rows {
        for (k, r) in row.into_iter().enumerate() {
            by_kind[k].push(r);
        }
    }
    let [exact, marg, optimal] = by_kind;
    Ok(vec![
        worst_case("coupling_disagreement_equals_tv", exact),
        worst_case("coupling_marginals", marg),
        worst_case("coupling_beats_random_feasible", optimal),
    ])
}

/// `I(X;Y) ≥ β⁴/8` on random joints with `|X| ≤ 1`, `E X = 0`, `E Y² ≤ 1`.
pub fn bounded_lemma_suite(cases: usize, seed: u64, exec: Execution) -> BoundReport {
    let reports = map_indexed(cases, exec, |i| verify_bounded_lemma(&random_bounded_joint(&mut trial_rng(seed, BOUNDED_STREAM, i as u64))));
    worst_case("bounded_correlation_lemma_suite", reports)
}

/// Sub-Gaussian correlation lemma on scaled Rademacher sums with certified proxy.
pub fn subgaussian_lemma_suite(cases: usize, seed: u64, exec: Execution) -> BoundReport {
    let reports = map_indexed(cases, exec, |i| {
        let (j, c) = random_rademacher_joint(&mut trial_rng(seed, SUBGAUSSIAN_STREAM, i as u64));
        verify_subgaussian_lemma(&j, c)
    });
    worst_case("subgaussian_lemma_suite", reports)
}

/// Grid of `n` points on `[0, 0.999 · a_max]` where `G_m` is non-vacuous.
pub fn gm_grid(m: usize, n: usize) -> Vec<f64> {
    let top = 0.999 * gm_domain_limit(m);
    (0..n).map(|i| top * i as f64 / (n - 1) as f64).collect()
}

/// Monotonicity and midpoint convexity of `G_m` on a 1000-point grid of its
/// non-vacuous domain.
pub fn gm_shape_checks(m: usize) -> Vec<BoundReport> {
    let grid = gm_grid(m, 1000);
    let vals: Vec<f64> = grid.iter().map(|&a| gm(a, m)).collect();
    let steps = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let convex = vals.windows(3).map(|w| 0.5 * (w[0] + w[2]) - w[1]).fold(f64::INFINITY, f64::min);
    let note = format!("grid [0, {:.6e}], vacuous beyond {:.6e}", grid[grid.len() - 1], gm_domain_limit(m));
    vec![
        BoundReport::at_least("gm_monotone", steps, 0.0, 0.0).with_dims(0, m).with_trials(1000, 0.0).with_note(note.clone()),
        BoundReport::at_least("gm_midpoint_convex", convex, 0.0, 1e-12).with_dims(0, m).with_trials(1000, 0.0).with_note(note),
    ]
}

/// The two point-law Paley–Zygmund examples.
pub fn paley_zygmund_examples() -> Result<Vec<BoundReport>> {
    let mut constant = paley_zygmund_check(&[2.0], &[1.0], 0.5)?;
    constant.name = "paley_zygmund_constant".into();
    let mut bit = paley_zygmund_check(&[0.0, 1.0], &[0.5, 0.5], 0.5)?;
    bit.name = "paley_zygmund_bit".into();
    let ok = (bit.lhs - 0.5).abs() < 1e-15 && (bit.rhs - 0.125).abs() < 1e-15;
    bit = bit.require(ok, "expected P = 1/2 against 1/8");
    Ok(vec![constant, bit])
}
