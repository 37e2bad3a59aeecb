//! The fingerprinting inequality for estimators of a uniform bias.

use rand::Rng;

use crate::error::{Error, Result};
use crate::parallel::{monte_carlo, Execution, MonteCarlo};
use crate::quadrature::GaussLegendre;
use crate::sco::MAX_BIAS;

use super::report::BoundReport;

pub const FINGERPRINT_TARGET: f64 = 1.0 / 27.0;

/// Largest `m` for exhaustive enumeration of `{±1}^m`.
pub const QUADRATURE_MAX_M: usize = 12;

/// `(1 − 9p²)/(9 − 9p²)`.
pub fn fingerprint_factor(p: f64) -> f64 {
    (1.0 - 9.0 * p * p) / (9.0 - 9.0 * p * p)
}

/// `(1−9p²)/(9−9p²) · (f − p) · Σ(x_i − p) + (f − p)²`.
pub fn fingerprint_statistic(fval: f64, p: f64, xs: &[i8]) -> Result<f64> {
    if !(fval.abs() <= MAX_BIAS + 1e-15) {
        return Err(Error::InvalidParameter(format!("estimate {fval} outside [-1/3, 1/3]")));
    }
    if !(p.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("bias {p} must satisfy |p| < 1")));
    }
    let centred: f64 = xs.iter().map(|&x| x as f64 - p).sum();
    Ok(statistic(fval, p, centred))
}

#[inline]
fn statistic(fval: f64, p: f64, centred_sum: f64) -> f64 {
    let e = fval - p;
    fingerprint_factor(p) * e * centred_sum + e * e
}

/// Estimators `f: {±1}^m → [−1/3, 1/3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    Zero,
    Constant(f64),
    /// Sample mean clipped to `[−1/3, 1/3]`.
    ClippedMean,
    /// `sign(Σ x_i)/3` with `sign(0) = 0`.
    Sign,
}

impl Estimator {
    pub fn name(&self) -> String {
        match self {
            Estimator::Zero => "zero".into(),
            Estimator::Constant(c) => format!("constant({c})"),
            Estimator::ClippedMean => "clipped_mean".into(),
            Estimator::Sign => "sign".into(),
        }
    }

    /// Value on a pattern with the given sign sum, clipped to the lemma's range.
    pub fn eval_sum(&self, sum: i64, m: usize) -> f64 {
        let v = match self {
            Estimator::Zero => 0.0,
            Estimator::Constant(c) => *c,
            Estimator::ClippedMean => sum as f64 / m as f64,
            Estimator::Sign => sum.signum() as f64 * MAX_BIAS,
        };
        v.clamp(-MAX_BIAS, MAX_BIAS)
    }

    pub fn eval(&self, xs: &[i8]) -> f64 {
        self.eval_sum(xs.iter().map(|&x| x as i64).sum(), xs.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FingerprintMode {
    /// Enumerate `{±1}^m` and integrate `P` with Gauss–Legendre.
    Quadrature { nodes: usize },
    MonteCarlo(MonteCarlo),
}

/// Exact inner expectation over `{±1}^m` at bias `p`, for an estimator given per pattern.
fn pattern_expectation(values: &[f64], sums: &[i64], plus: &[u32], m: usize, p: f64) -> f64 {
    let up = 0.5 * (1.0 + p);
    let down = 0.5 * (1.0 - p);
    let mut total = 0.0;
    for ((&f, &s), &k) in values.iter().zip(sums).zip(plus) {
        let w = up.powi(k as i32) * down.powi((m as u32 - k) as i32);
        total += w * statistic(f, p, s as f64 - m as f64 * p);
    }
    total
}

/// `E_{P∼U[−1/3,1/3]} E_{X∼U_m(P)}[statistic]` checked against `1/27`.
pub fn fingerprint_expectation(est: Estimator, m: usize, mode: FingerprintMode) -> Result<BoundReport> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be ≥ 1".into()));
    }
    let name = format!("fingerprint[{}]", est.name());
    match mode {
        FingerprintMode::Quadrature { nodes } => {
            if m > QUADRATURE_MAX_M {
                return Err(Error::BudgetExceeded { needed: 1u128 << m, budget: 1u128 << QUADRATURE_MAX_M });
            }
            let n = 1usize << m;
            let mut values = Vec::with_capacity(n);
            let mut sums = Vec::with_capacity(n);
            let mut plus = Vec::with_capacity(n);
            for bits in 0..n as u32 {
                let k = bits.count_ones();
                let s = 2 * k as i64 - m as i64;
                values.push(est.eval_sum(s, m));
                sums.push(s);
                plus.push(k);
            }
            let rule = GaussLegendre::new(nodes);
            let value = rule.uniform_expectation(-MAX_BIAS, MAX_BIAS, |p| pattern_expectation(&values, &sums, &plus, m, p));
            Ok(BoundReport::at_least(name, value, FINGERPRINT_TARGET, 1e-6)
                .with_dims(1, m)
                .with_note(format!("quadrature nodes = {nodes}")))
        }
        FingerprintMode::MonteCarlo(mc) => {
            let moments = monte_carlo(&mc, 1, |rng, out| {
                let p = rng.gen_range(-MAX_BIAS..=MAX_BIAS);
                let up = 0.5 * (1.0 + p);
                let mut sum = 0i64;
                for _ in 0..m {
                    sum += if rng.gen::<f64>() < up { 1 } else { -1 };
                }
                out[0] = statistic(est.eval_sum(sum, m), p, sum as f64 - m as f64 * p);
            });
            let mo = moments[0];
            let half = 3.0 * mo.std_error();
            Ok(BoundReport::at_least(name, mo.mean(), FINGERPRINT_TARGET, half)
                .with_dims(1, m)
                .with_trials(mo.n, half)
                .with_seed(mc.seed))
        }
    }
}

/// Default Monte Carlo budget with parallel execution.
pub fn fingerprint_monte_carlo(est: Estimator, m: usize, trials: u64, seed: u64, exec: Execution) -> Result<BoundReport> {
    fingerprint_expectation(est, m, FingerprintMode::MonteCarlo(MonteCarlo::new(trials, seed).with_exec(exec)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_examples() {
        assert_eq!(fingerprint_statistic(0.0, 0.0, &[1, -1]).unwrap(), 0.0);
        let v = fingerprint_statistic(1.0 / 3.0, 0.0, &[1]).unwrap();
        assert!((v - 4.0 / 27.0).abs() < 1e-15);
        assert!(fingerprint_statistic(0.5, 0.0, &[1]).is_err());
        assert!(fingerprint_statistic(0.0, 1.0, &[1]).is_err());
        assert!((fingerprint_factor(0.0) - 1.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn zero_estimator_is_tight() {
        for m in [1, 4, 9] {
            let r = fingerprint_expectation(Estimator::Zero, m, FingerprintMode::Quadrature { nodes: 64 }).unwrap();
            assert!((r.lhs - FINGERPRINT_TARGET).abs() < 1e-9, "m={m}: {}", r.lhs);
        }
    }

    #[test]
    fn zero_estimator_conditional_mean_is_p_squared() {
        let m = 5;
        let n = 1 << m;
        let sums: Vec<i64> = (0..n as u32).map(|b| 2 * b.count_ones() as i64 - m as i64).collect();
        let plus: Vec<u32> = (0..n as u32).map(|b| b.count_ones()).collect();
        let vals = vec![0.0; n];
        for p in [-0.3, 0.0, 0.2] {
            assert!((pattern_expectation(&vals, &sums, &plus, m, p) - p * p).abs() < 1e-14);
        }
    }

    #[test]
    fn estimators_are_clipped() {
        assert_eq!(Estimator::ClippedMean.eval(&[1, 1]), MAX_BIAS);
        assert_eq!(Estimator::Sign.eval(&[1, -1]), 0.0);
        assert_eq!(Estimator::Constant(-1.0).eval(&[1]), -MAX_BIAS);
    }

    #[test]
    fn quadrature_budget() {
        assert!(fingerprint_expectation(Estimator::Zero, 13, FingerprintMode::Quadrature { nodes: 8 }).is_err());
    }
}
