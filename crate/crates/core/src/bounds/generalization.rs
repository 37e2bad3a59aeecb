//! Exact generalization checks on enumerated channels, and Monte Carlo checks of the
//! risk identities on the hard instance.

use rand::Rng;

use crate::error::Result;
use crate::learners::{exact_channel, Channel, Learner, LearnerSpec};
use crate::parallel::{monte_carlo, MonteCarlo};
use crate::sco::{HardInstance, LOSS_RANGE};

use super::lemmas::xu_bound;
use super::report::BoundReport;

/// Exact `E[L_D(w_S) − L_S(w_S)]` against `4 √(2 I(w_S;S)/m)`.
pub fn xu_check(learner: &Learner, inst: &HardInstance) -> Result<BoundReport> {
    let ch = exact_channel(learner, inst)?;
    xu_check_channel(&ch, &learner.spec().name())
}

pub fn xu_check_channel(ch: &Channel, label: &str) -> Result<BoundReport> {
    let mi = ch.mutual_information();
    let bound = xu_bound(mi, ch.m(), LOSS_RANGE)?;
    Ok(BoundReport::at_most(format!("xu[{label}]"), ch.expected_gap(), bound, 1e-12)
        .with_dims(ch.d(), ch.m())
        .with_note(format!("mi_nats = {mi:.16e}")))
}

/// `I(w_S; Σ z_i) ≥ Σ_t I(w_S(t); Σ_i z_i(t))`, with equality required when the
/// learner is coordinate-factorized.
pub fn chain_rule_decomposition(ch: &Channel, factorized: bool) -> Result<BoundReport> {
    let (joint, per_coord) = ch.chain_rule_terms()?;
    let mut r = BoundReport::at_least("chain_rule", joint, per_coord, 1e-9).with_dims(ch.d(), ch.m());
    if factorized {
        r = r.require((joint - per_coord).abs() <= 1e-10, "factorized learner must give equality");
    }
    Ok(r)
}

/// Monte Carlo check that the mean learner has `E[Δ_D] = (1 − ‖p‖²/d)/m` and `Δ_S = 0`.
pub fn mean_learner_risk_check(inst: &HardInstance, m: usize, mc: &MonteCarlo) -> Result<Vec<BoundReport>> {
    let learner = LearnerSpec::Mean.compile(inst.d(), m)?;
    let moments = monte_carlo(mc, 2, |rng, out| {
        let s = inst.sample(m, rng).expect("m ≥ 1");
        let w = learner.run(&s, rng).expect("sample matches learner");
        out[0] = inst.suboptimality(w.as_slice()).expect("dimension");
        out[1] = s.empirical_suboptimality(w.as_slice()).expect("dimension");
    });
    let expected = inst.mean_estimator_risk(m);
    let dd = moments[0];
    let ds = moments[1];
    let half = 3.0 * dd.std_error();
    let close = BoundReport::at_most("mean_excess_risk_matches_closed_form", (dd.mean() - expected).abs(), half, 0.0)
        .with_dims(inst.d(), m)
        .with_trials(dd.n, half)
        .with_seed(mc.seed)
        .with_note(format!("closed form {expected:.16e}, estimate {:.16e}", dd.mean()));
    let zero = BoundReport::at_most("mean_empirical_suboptimality_zero", ds.mean(), 0.0, 1e-12)
        .with_dims(inst.d(), m)
        .with_trials(ds.n, 0.0)
        .with_seed(mc.seed);
    Ok(vec![close, zero])
}

/// Tail frequencies of `Σ_i (√d z_i(t) − p)` against `2 exp(−τ²/c²)` with `c = 2√m`.
pub fn subgaussian_tail_check(p: f64, m: usize, taus: &[f64], mc: &MonteCarlo) -> Vec<BoundReport> {
    let up = 0.5 * (1.0 + p);
    let moments = monte_carlo(mc, taus.len(), |rng, out| {
        let mut x = 0.0;
        for _ in 0..m {
            x += if rng.gen::<f64>() < up { 1.0 } else { -1.0 } - p;
        }
        for (o, &tau) in out.iter_mut().zip(taus) {
            *o = if x.abs() >= tau { 1.0 } else { 0.0 };
        }
    });
    let c2 = 4.0 * m as f64;
    taus.iter()
        .zip(&moments)
        .map(|(&tau, mo)| {
            let half = 3.0 * mo.std_error();
            BoundReport::at_most(format!("subgaussian_tail[tau={tau}]"), mo.mean(), 2.0 * (-tau * tau / c2).exp(), half)
                .with_dims(1, m)
                .with_trials(mo.n, half)
                .with_seed(mc.seed)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xu_mean_d1_m2() {
        let inst = HardInstance::unbiased(1).unwrap();
        let r = xu_check(&LearnerSpec::Mean.compile(1, 2).unwrap(), &inst).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12);
        assert!((r.rhs - 4.0 * (1.5 * 2f64.ln()).sqrt()).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn chain_rule_cases() {
        let inst = HardInstance::new(vec![0.1, -0.2]).unwrap();
        let q = LearnerSpec::QuantizedMean { delta: 0.3 }.compile(2, 3).unwrap();
        let r = chain_rule_decomposition(&exact_channel(&q, &inst).unwrap(), q.is_coordinate_factorized()).unwrap();
        assert!(r.holds, "{r:?}");
        let c = LearnerSpec::Constant(vec![0.0, 0.0]).compile(2, 3).unwrap();
        let r = chain_rule_decomposition(&exact_channel(&c, &inst).unwrap(), true).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let net = LearnerSpec::EpsilonNetErm.compile(2, 2).unwrap();
        let r = chain_rule_decomposition(&exact_channel(&net, &inst).unwrap(), false).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn tail_check_holds() {
        let mc = MonteCarlo::new(20_000, 4);
        for r in subgaussian_tail_check(0.2, 4, &[0.5, 1.0, 2.0, 3.0, 4.0], &mc) {
            assert!(r.holds, "{r:?}");
        }
    }
}
