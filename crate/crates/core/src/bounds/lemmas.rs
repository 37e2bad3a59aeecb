//! Closed-form bounds and verifiers for the correlation-to-information lemmas.

use std::f64::consts::{E, SQRT_2};

use rand::Rng;

use crate::error::{Error, Result};
use crate::infotheory::{mutual_information, JointPmf};

use super::report::BoundReport;

fn check_generalization_args(info: f64, m: usize, loss_range: f64) -> Result<f64> {
    if !(info.is_finite() && info >= -crate::PROB_TOLERANCE) {
        return Err(Error::InvalidParameter(format!("information {info} must be ≥ 0")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be ≥ 1".into()));
    }
    if !(loss_range > 0.0) {
        return Err(Error::InvalidParameter(format!("loss range {loss_range} must be > 0")));
    }
    Ok(info.max(0.0))
}

/// `B · √(2 I / m)`: the mutual-information generalization bound for a loss with range `B`.
pub fn xu_bound(mi: f64, m: usize, loss_range: f64) -> Result<f64> {
    let mi = check_generalization_args(mi, m, loss_range)?;
    Ok(loss_range * (2.0 * mi / m as f64).sqrt())
}

/// `B · √(2 CMI / m)`.
pub fn cmi_generalization_bound(cmi: f64, m: usize, loss_range: f64) -> Result<f64> {
    let cmi = check_generalization_args(cmi, m, loss_range)?;
    Ok(loss_range * (2.0 * cmi / m as f64).sqrt())
}

/// `β⁴/8`, the square of `β²/(2√2)`.
pub fn corbounded_mi_lower_bound(beta: f64) -> f64 {
    (beta.powi(4) / 8.0).max(0.0)
}

/// `[β² / (192√2 c² ln(2^20 c²/β²))]²`, or 0 when the log argument is at most `e`.
pub fn subgaussian_mi_lower_bound(beta: f64, c: f64) -> f64 {
    if beta == 0.0 || !(c > 0.0) {
        return 0.0;
    }
    let ratio = c * c / (beta * beta);
    let arg = 1_048_576.0 * ratio;
    if !(arg > E) {
        return 0.0;
    }
    (1.0 / (192.0 * SQRT_2 * ratio * arg.ln())).powi(2)
}

/// `G_m(a) = [a² / (192√2 · 4m · ln(2^20 · 4m / a²))]²`, zero where the log argument is at most `e`.
pub fn gm(a: f64, m: usize) -> f64 {
    if !(a > 0.0) {
        return 0.0;
    }
    let four_m = 4.0 * m as f64;
    let arg = 1_048_576.0 * four_m / (a * a);
    if !(arg > E) {
        return 0.0;
    }
    (a * a / (192.0 * SQRT_2 * four_m * arg.ln())).powi(2)
}

/// Largest `a` at which `G_m` is non-vacuous: `a² < 2^22 m / e`.
pub fn gm_domain_limit(m: usize) -> f64 {
    (4_194_304.0 * m as f64 / E).sqrt()
}

/// Paley–Zygmund over a finite law: `P(Z ≥ θ E Z) ≥ (1−θ)² (E Z)² / E[Z²]`.
pub fn paley_zygmund_check(values: &[f64], probs: &[f64], theta: f64) -> Result<BoundReport> {
    if values.len() != probs.len() || values.is_empty() {
        return Err(Error::InvalidParameter("values and probabilities must have equal nonzero length".into()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("θ = {theta} outside (0, 1)")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > crate::PROB_TOLERANCE || probs.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidPmf(format!("weights sum to {total}")));
    }
    let mean: f64 = values.iter().zip(probs).map(|(z, p)| z * p).sum();
    let second: f64 = values.iter().zip(probs).map(|(z, p)| z * z * p).sum();
    let lhs: f64 = values.iter().zip(probs).filter(|(z, _)| **z >= theta * mean).map(|(_, p)| p).sum();
    let rhs = if second > 0.0 { (1.0 - theta).powi(2) * mean * mean / second } else { 0.0 };
    let mut report = BoundReport::at_least("paley_zygmund", lhs, rhs, crate::PROB_TOLERANCE);
    let negatives = values.iter().filter(|&&z| z < 0.0).count();
    if negatives > 0 {
        report = report.hypothesis_violated(format!("{negatives} negative values"));
    }
    Ok(report)
}

/// Paley–Zygmund over the empirical law of `values`.
pub fn paley_zygmund_from_samples(values: &[f64], theta: f64) -> Result<BoundReport> {
    let w = vec![1.0 / values.len().max(1) as f64; values.len()];
    let w = renormalize(w);
    paley_zygmund_check(values, &w, theta)
}

fn renormalize(mut w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// `(1/4) · 1/(54² m ε)`: the good-pair probability from Paley–Zygmund at `θ = 1/2`.
pub fn pz_good_fraction(m: usize, epsilon: f64) -> f64 {
    0.25 / (54.0 * 54.0 * m as f64 * epsilon)
}

/// `1/(10^6 m ε)`.
pub fn good_fraction_floor(m: usize, epsilon: f64) -> f64 {
    1.0 / (1e6 * m as f64 * epsilon)
}

/// Report that `pz_good_fraction ≥ good_fraction_floor`.
pub fn concentration_constant_check(m: usize, epsilon: f64) -> BoundReport {
    BoundReport::at_least("pz_concentration_constant", pz_good_fraction(m, epsilon), good_fraction_floor(m, epsilon), 0.0)
        .with_dims(0, m)
        .with_epsilon(epsilon)
}

/// A finite joint law of two real random variables.
#[derive(Debug, Clone)]
pub struct RealJoint {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub joint: JointPmf,
}

impl RealJoint {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, table: Vec<f64>) -> Result<Self> {
        let joint = JointPmf::from_table(xs.len(), ys.len(), table)?;
        Ok(RealJoint { xs, ys, joint })
    }

    fn expect<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let mut total = 0.0;
        for (i, &x) in self.xs.iter().enumerate() {
            for (j, &y) in self.ys.iter().enumerate() {
                total += self.joint.get(i, j) * f(x, y);
            }
        }
        total
    }

    pub fn mean_x(&self) -> f64 {
        self.expect(|x, _| x)
    }

    pub fn second_moment_y(&self) -> f64 {
        self.expect(|_, y| y * y)
    }

    pub fn correlation(&self) -> f64 {
        self.expect(|x, y| x * y)
    }

    pub fn max_abs_x(&self) -> f64 {
        self.xs.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn mutual_information(&self) -> f64 {
        mutual_information(&self.joint)
    }

    /// Largest `P(|X| ≥ τ) / (2 e^{−τ²/c²})` over support points `τ = |x| > 0`.
    /// A value at most 1 certifies the tail condition for every `τ ≥ 0`.
    pub fn tail_ratio(&self, c: f64) -> f64 {
        let px = self.joint.x_marginal();
        let mut worst: f64 = 0.0;
        for &x in &self.xs {
            let tau = x.abs();
            if tau == 0.0 {
                continue;
            }
            let tail: f64 = self.xs.iter().zip(px.probs()).filter(|(v, _)| v.abs() >= tau).map(|(_, p)| p).sum();
            worst = worst.max(tail / (2.0 * (-tau * tau / (c * c)).exp()));
        }
        worst
    }
}

/// Random joint meeting the bounded-correlation hypotheses: `|X| ≤ 1`, `E X = 0`, `E Y² = 1`.
pub fn random_bounded_joint<R: Rng + ?Sized>(rng: &mut R) -> RealJoint {
    let nx = rng.gen_range(2..=8);
    let ny = rng.gen_range(2..=8);
    let coupling: f64 = rng.gen_range(0.0..8.0);
    let mut table = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let base = rng.gen::<f64>().powi(3);
            let diag = if i * ny / nx == j { coupling } else { 0.0 };
            table.push(base + diag);
        }
    }
    let table = renormalize(table);
    let mut xs: Vec<f64> = (0..nx).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mut ys: Vec<f64> = (0..ny).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let probe = RealJoint::new(xs.clone(), ys.clone(), table.clone()).expect("normalised table");
    let mu = probe.mean_x();
    xs.iter_mut().for_each(|x| *x -= mu);
    let span = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if span > 0.0 {
        xs.iter_mut().for_each(|x| *x /= span);
    }
    let ey2 = probe.second_moment_y();
    if ey2 > 0.0 {
        let s = ey2.sqrt();
        ys.iter_mut().for_each(|y| *y /= s);
    }
    RealJoint::new(xs, ys, table).expect("normalised table")
}

/// Exact MI against `β⁴/8` after confirming the hypotheses.
pub fn verify_bounded_lemma(j: &RealJoint) -> BoundReport {
    let beta = j.correlation();
    let mut r = BoundReport::at_least("lemma_bounded_correlation", j.mutual_information(), corbounded_mi_lower_bound(beta), 1e-9);
    let tol = 1e-12;
    if j.mean_x().abs() > tol || j.max_abs_x() > 1.0 + tol || j.second_moment_y() > 1.0 + tol {
        r = r.hypothesis_violated("joint does not meet |X| ≤ 1, E X = 0, E Y² ≤ 1");
    }
    r
}

/// `X = a · Σ_{i≤n} ε_i` with Rademacher `ε_i`, `Y = ±1` according to `X > shift`,
/// flipped with probability `eta`. Hoeffding gives the proxy `c = a √(2n)`.
pub fn rademacher_joint(n: usize, a: f64, shift: f64, eta: f64) -> Result<(RealJoint, f64)> {
    if n == 0 || !(a > 0.0) || !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter("need n ≥ 1, a > 0, η ∈ [0, 1]".into()));
    }
    let xs: Vec<f64> = (0..=n).map(|b| a * (2.0 * b as f64 - n as f64)).collect();
    let ys = vec![-1.0, 1.0];
    let mut table = Vec::with_capacity(2 * (n + 1));
    let half_n = 0.5f64.powi(n as i32);
    let mut coef = 1.0;
    for (b, &x) in xs.iter().enumerate() {
        if b > 0 {
            coef = coef * (n - b + 1) as f64 / b as f64;
        }
        let px = coef * half_n;
        let up = if x > shift { 1.0 - eta } else { eta };
        table.push(px * (1.0 - up));
        table.push(px * up);
    }
    let c = a * (2.0 * n as f64).sqrt();
    Ok((RealJoint::new(xs, ys, table)?, c))
}

pub fn random_rademacher_joint<R: Rng + ?Sized>(rng: &mut R) -> (RealJoint, f64) {
    let n = rng.gen_range(1..=12);
    let a = if rng.gen_bool(0.5) { 1.0 / (n as f64).sqrt() } else { rng.gen_range(0.05..=1.0) };
    let shift = rng.gen_range(-0.5..=0.5) * a * n as f64;
    let eta = rng.gen_range(0.0..=0.5);
    rademacher_joint(n, a, shift, eta).expect("valid parameters")
}

/// Exact MI against the sub-Gaussian bound at proxy `c`, after certifying the tail.
pub fn verify_subgaussian_lemma(j: &RealJoint, c: f64) -> BoundReport {
    let beta = j.correlation();
    let mut r = BoundReport::at_least("lemma_subgaussian", j.mutual_information(), subgaussian_mi_lower_bound(beta, c), 1e-12);
    let tol = 1e-12;
    if j.mean_x().abs() > tol || j.second_moment_y() > 1.0 + tol {
        r = r.hypothesis_violated("joint does not meet E X = 0, E Y² ≤ 1");
    }
    if j.tail_ratio(c) > 1.0 + tol {
        r = r.hypothesis_violated(format!("tail not dominated at proxy c = {c}"));
    }
    r
}
