//! Conditional mutual information under the supersample construction.
//!
//! A supersample `Z` holds pairs `(z_i^0, z_i^1)`; selector bits `U_i` pick
//! `S_i = z_i^{U_i}`. Since the output depends on `(Z, U)` only through `S`,
//! `I(w_S; S | Z) = I(w_S; U | Z)`, and only the first `prefix_len` pairs matter.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::parallel::{monte_carlo, sum_indexed, Execution, MonteCarlo};
use crate::sco::{HardInstance, Sample};

/// `I(w_S; U | Z = z)` for a supersample given as `2k` points: rows `0..k` are the
/// first members of each pair and rows `k..2k` the second.
fn selector_information(learner: &Learner, d: usize, k: usize, supersample: &[i8]) -> Result<f64> {
    let n_u = 1usize << k;
    let mut rows: Vec<Vec<(Vec<u64>, f64)>> = Vec::with_capacity(n_u);
    let mut marginal: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    let weight = 1.0 / n_u as f64;
    for u in 0..n_u {
        let mut signs = Vec::with_capacity(k * d);
        for i in 0..k {
            let row = if u >> i & 1 == 1 { k + i } else { i };
            signs.extend_from_slice(&supersample[row * d..(row + 1) * d]);
        }
        let law = learner.law_of_prefix(&Sample::from_signs(d, k, signs)?)?;
        let row: Vec<(Vec<u64>, f64)> = law.into_iter().map(|(w, p)| (w.key(), p)).collect();
        for (key, p) in &row {
            *marginal.entry(key.clone()).or_default() += weight * p;
        }
        rows.push(row);
    }
    let mut total = 0.0;
    for row in &rows {
        for (key, p) in row {
            if *p > 0.0 {
                total += weight * p * (p / marginal[key]).ln();
            }
        }
    }
    Ok(total.max(0.0))
}

/// Exact `CMI = I(w_S; S | Z)`, enumerating `2^(2dk)` supersamples and `2^k` selectors
/// with `k = learner.prefix_len()`.
pub fn cmi_exact(learner: &Learner, inst: &HardInstance, budget: u128, exec: Execution) -> Result<f64> {
    let d = inst.d();
    if learner.d() != d {
        return Err(Error::DimensionMismatch { expected: learner.d(), got: d });
    }
    let k = learner.prefix_len();
    let bits = 2 * d * k + k;
    let needed = if bits >= 127 { u128::MAX } else { 1u128 << bits };
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let n_z = 1usize << (2 * d * k);
    let parts: Vec<Result<f64>> = crate::parallel::map_indexed(n_z, exec, |idx| {
        let z = Sample::from_bits(d, 2 * k, idx as u64);
        let prob = inst.sample_prob(&z);
        Ok(prob * selector_information(learner, d, k, z.signs())?)
    });
    let values = parts.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(sum_indexed(values.len(), Execution::Sequential, |i| values[i]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmiEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Draw supersamples at random and average the exact inner `I(w_S; U | Z)`.
pub fn cmi_monte_carlo(learner: &Learner, inst: &HardInstance, mc: &MonteCarlo) -> Result<CmiEstimate> {
    let d = inst.d();
    if learner.d() != d {
        return Err(Error::DimensionMismatch { expected: learner.d(), got: d });
    }
    let k = learner.prefix_len();
    if k > 20 {
        return Err(Error::BudgetExceeded { needed: 1u128 << k, budget: 1 << 20 });
    }
    let moments = monte_carlo(mc, 1, |rng, out| {
        let z = inst.sample(2 * k, rng).expect("k ≥ 1");
        out[0] = selector_information(learner, d, k, z.signs()).expect("valid prefix");
    });
    let mo = moments[0];
    Ok(CmiEstimate { mean: mo.mean(), std_error: mo.std_error(), trials: mo.n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::LearnerSpec;

    #[test]
    fn constant_learner_has_zero_cmi() {
        let inst = HardInstance::new(vec![0.1]).unwrap();
        let l = LearnerSpec::Constant(vec![0.2]).compile(1, 2).unwrap();
        assert_eq!(cmi_exact(&l, &inst, 1 << 20, Execution::Sequential).unwrap(), 0.0);
    }

    #[test]
    fn mean_d1_m2_is_below_selector_entropy() {
        let inst = HardInstance::unbiased(1).unwrap();
        let l = LearnerSpec::Mean.compile(1, 2).unwrap();
        let cmi = cmi_exact(&l, &inst, 1 << 20, Execution::Sequential).unwrap();
        assert!(cmi > 0.0 && cmi <= 2.0 * 2f64.ln() + 1e-9);
        // One differing pair (prob 1/2) reveals ln 2; two (prob 1/4) reveal the sum, 1.5 ln 2.
        assert!((cmi - 0.875 * 2f64.ln()).abs() < 1e-12);
        let par = cmi_exact(&l, &inst, 1 << 20, Execution::Parallel).unwrap();
        assert_eq!(cmi, par);
    }

    #[test]
    fn subsample_cmi_is_capped_by_k() {
        let inst = HardInstance::new(vec![0.2]).unwrap();
        let l = LearnerSpec::Subsample { k: 1, base: Box::new(LearnerSpec::Mean) }.compile(1, 3).unwrap();
        let cmi = cmi_exact(&l, &inst, 1 << 20, Execution::Sequential).unwrap();
        assert!(cmi <= 2f64.ln() + 1e-9);
        let mc = cmi_monte_carlo(&l, &inst, &MonteCarlo::new(20_000, 1)).unwrap();
        assert!((mc.mean - cmi).abs() < 4.0 * mc.std_error + 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let inst = HardInstance::unbiased(3).unwrap();
        let l = LearnerSpec::Mean.compile(3, 4).unwrap();
        assert!(cmi_exact(&l, &inst, 1 << 20, Execution::Sequential).is_err());
    }
}
