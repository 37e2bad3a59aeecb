//! The correlation attack on the hard instance: `X_p(t)`, `Y_p(t)` and the good set.

use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::parallel::{monte_carlo, Execution, MonteCarlo};
use crate::sco::{HardInstance, Parameter, Sample};

use super::fingerprint::fingerprint_factor;

/// Correlation threshold for a coordinate to count as good.
pub const GOOD_THRESHOLD: f64 = 1.0 / 108.0;

/// `X_p(t)` and `Y_p(t)` for one sample and one coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackStats {
    pub t: usize,
    pub p: f64,
    pub normalizer: f64,
    pub x_p: f64,
    pub y_p: f64,
}

impl AttackStats {
    pub fn product(&self) -> f64 {
        self.x_p * self.y_p
    }
}

/// `X_p = α(p) · ν · Σ_i (√d z_i(t) − p)` and `Y_p = (p̂(t) − p)/ν` with `p̂ = √d w(t)`.
pub fn attack_statistics(inst: &HardInstance, s: &Sample, w: &Parameter, t: usize, normalizer: f64) -> Result<AttackStats> {
    if t >= inst.d() || w.dim() != inst.d() || s.d() != inst.d() {
        return Err(Error::DimensionMismatch { expected: inst.d(), got: w.dim().min(s.d()) });
    }
    if !(normalizer > 0.0 && normalizer.is_finite()) {
        return Err(Error::InvalidParameter(format!("normalizer {normalizer} for coordinate {t} is not positive")));
    }
    let p = inst.p()[t];
    let sqrt_d = (inst.d() as f64).sqrt();
    let centred = s.sign_sums()[t] as f64 - s.m() as f64 * p;
    let p_hat = sqrt_d * w.as_slice()[t];
    Ok(AttackStats {
        t,
        p,
        normalizer,
        x_p: fingerprint_factor(p) * normalizer * centred,
        y_p: (p_hat - p) / normalizer,
    })
}

/// `√E[(p̂(t) − p(t))²]` per coordinate from a pilot run.
pub fn estimate_normalizers(learner: &Learner, inst: &HardInstance, mc: &MonteCarlo) -> Vec<f64> {
    let d = inst.d();
    let m = learner.m();
    let sqrt_d = (d as f64).sqrt();
    let moments = monte_carlo(mc, d, |rng, out| {
        let s = inst.sample(m, rng).expect("m ≥ 1");
        let w = learner.run(&s, rng).expect("sample matches learner");
        for t in 0..d {
            out[t] = (sqrt_d * w.as_slice()[t] - inst.p()[t]).powi(2);
        }
    });
    moments.iter().map(|mo| mo.mean().max(0.0).sqrt()).collect()
}

/// Monte Carlo summary of one coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateEstimate {
    pub t: usize,
    pub normalizer: f64,
    /// Estimate of `E_S[X_p(t) Y_p(t)]`.
    pub correlation: f64,
    pub correlation_se: f64,
    /// Estimate of `E_S[(p̂(t) − p(t))²]`.
    pub sq_error: f64,
    pub sq_error_se: f64,
    pub x_second_moment: f64,
    pub y_second_moment: f64,
    pub y_second_moment_se: f64,
    /// Excluded because the pilot normalizer vanished.
    pub excluded: bool,
    pub good: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoodSet {
    pub coordinates: Vec<CoordinateEstimate>,
    pub good: Vec<usize>,
    pub trials: u64,
    /// Estimate of `E_S[Σ_t (p̂(t) − p(t))²]` and its standard error.
    pub total_sq_error: f64,
    pub total_sq_error_se: f64,
}

impl GoodSet {
    pub fn fraction(&self) -> f64 {
        self.good.len() as f64 / self.coordinates.len() as f64
    }
}

/// Estimate `E_S[X_p(t)Y_p(t)]` for every coordinate and keep those whose lower
/// 3-standard-error limit clears `1/108`. The pilot uses stream `2·stream` and the
/// main run `2·stream + 1`.
pub fn good_coordinates(
    learner: &Learner,
    inst: &HardInstance,
    pilot_trials: u64,
    trials: u64,
    seed: u64,
    stream: u64,
    exec: Execution,
) -> Result<GoodSet> {
    let d = inst.d();
    if learner.d() != d {
        return Err(Error::DimensionMismatch { expected: learner.d(), got: d });
    }
    let m = learner.m();
    let pilot = MonteCarlo::new(pilot_trials, seed).with_stream(2 * stream).with_exec(exec);
    let normalizers = estimate_normalizers(learner, inst, &pilot);
    let main = MonteCarlo::new(trials, seed).with_stream(2 * stream + 1).with_exec(exec);
    let sqrt_d = (d as f64).sqrt();
    let moments = monte_carlo(&main, 4 * d + 1, |rng, out| {
        let s = inst.sample(m, rng).expect("m ≥ 1");
        let w = learner.run(&s, rng).expect("sample matches learner");
        let sums = s.sign_sums();
        out[4 * d] = 0.0;
        for t in 0..d {
            let p = inst.p()[t];
            let err = sqrt_d * w.as_slice()[t] - p;
            let centred = sums[t] as f64 - m as f64 * p;
            let nu = normalizers[t];
            let (x, y) = if nu > 0.0 { (fingerprint_factor(p) * nu * centred, err / nu) } else { (0.0, 0.0) };
            out[4 * t] = x * y;
            out[4 * t + 1] = err * err;
            out[4 * t + 2] = x * x;
            out[4 * t + 3] = y * y;
            out[4 * d] += err * err;
        }
    });
    let mut coordinates = Vec::with_capacity(d);
    let mut good = Vec::new();
    for t in 0..d {
        let c = moments[4 * t];
        let excluded = normalizers[t] <= 0.0;
        let is_good = !excluded && c.mean() - 3.0 * c.std_error() >= GOOD_THRESHOLD;
        if is_good {
            good.push(t);
        }
        coordinates.push(CoordinateEstimate {
            t,
            normalizer: normalizers[t],
            correlation: c.mean(),
            correlation_se: c.std_error(),
            sq_error: moments[4 * t + 1].mean(),
            sq_error_se: moments[4 * t + 1].std_error(),
            x_second_moment: moments[4 * t + 2].mean(),
            y_second_moment: moments[4 * t + 3].mean(),
            y_second_moment_se: moments[4 * t + 3].std_error(),
            excluded,
            good: is_good,
        });
    }
    let total = &moments[4 * d];
    Ok(GoodSet { coordinates, good, trials, total_sq_error: total.mean(), total_sq_error_se: total.std_error() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::LearnerSpec;

    #[test]
    fn exact_optimum_gives_zero_product() {
        let inst = HardInstance::new(vec![0.2, -0.1]).unwrap();
        let s = Sample::from_signs(2, 2, vec![1, 1, -1, 1]).unwrap();
        let w = Parameter::new(inst.optimum()).unwrap();
        let a = attack_statistics(&inst, &s, &w, 0, 0.5).unwrap();
        assert!(a.y_p.abs() < 1e-15);
        assert!(a.product().abs() < 1e-15);
        assert!(attack_statistics(&inst, &s, &w, 0, 0.0).is_err());
    }

    #[test]
    fn mean_learner_has_positive_correlation() {
        let inst = HardInstance::unbiased(1).unwrap();
        let l = LearnerSpec::Mean.compile(1, 4).unwrap();
        let g = good_coordinates(&l, &inst, 10_000, 100_000, 9, 0, Execution::Parallel).unwrap();
        let c = &g.coordinates[0];
        assert!(c.correlation > 0.0);
        // E[X_p Y_p] = (1 − 9p²)/9 for the mean learner.
        assert!((c.correlation - 1.0 / 9.0).abs() < 4.0 * c.correlation_se);
        assert!((c.y_second_moment - 1.0).abs() < 0.05);
    }

    #[test]
    fn independent_output_has_no_good_coordinates() {
        let inst = HardInstance::new(vec![0.1, 0.2]).unwrap();
        let rr = LearnerSpec::RandomizedResponse { rho: 1.0, base: Box::new(LearnerSpec::Mean) };
        let g = good_coordinates(&rr.compile(2, 4).unwrap(), &inst, 2000, 20_000, 1, 0, Execution::Parallel).unwrap();
        assert!(g.good.is_empty());
    }

    #[test]
    fn coordinate_sign_learner_only_informs_its_coordinate() {
        let inst = HardInstance::new(vec![0.0, 0.0]).unwrap();
        let l = LearnerSpec::CoordinateSign { coordinate: 1 }.compile(2, 4).unwrap();
        let g = good_coordinates(&l, &inst, 5000, 50_000, 3, 0, Execution::Parallel).unwrap();
        assert!(!g.good.contains(&0));
        assert!(g.coordinates[0].excluded);
        assert_eq!(g.good, vec![1]);
    }
}
