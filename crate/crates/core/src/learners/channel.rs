//! Exact output channels `P(w_S | S)` over the enumerated sample space.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Execution};
use crate::sco::{HardInstance, Sample};

use super::{count_coordinate, lex_cmp, Learner};

/// Largest number of enumerated statistics per channel block.
pub const ENUMERATION_BUDGET: u128 = 1 << 24;

/// How the sample space was enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    /// One representative per vector of sign counts, weighted by its multinomial mass.
    Counts,
    /// Every sign pattern.
    Full,
    /// Independent per-coordinate channels over `2^m` column patterns.
    Factorized,
}

#[derive(Debug, Clone)]
struct Block {
    coords: Vec<usize>,
    probs: Vec<f64>,
    /// Plus-counts of each enumerated statistic, restricted to `coords`.
    counts: Vec<u32>,
    row_start: Vec<usize>,
    entries: Vec<(u32, f64)>,
    /// Output values restricted to `coords`, sorted lexicographically.
    outputs: Vec<Vec<f64>>,
}

impl Block {
    fn width(&self) -> usize {
        self.coords.len()
    }

    fn row(&self, s: usize) -> &[(u32, f64)] {
        &self.entries[self.row_start[s]..self.row_start[s + 1]]
    }

    fn count_row(&self, s: usize) -> &[u32] {
        &self.counts[s * self.width()..(s + 1) * self.width()]
    }

    fn cells(&self) -> impl Iterator<Item = (usize, u32, f64)> + '_ {
        (0..self.probs.len()).flat_map(move |s| self.row(s).iter().map(move |&(w, p)| (s, w, self.probs[s] * p)))
    }

    fn output_marginal(&self) -> Vec<f64> {
        let mut q = vec![0.0; self.outputs.len()];
        for (_, w, p) in self.cells() {
            q[w as usize] += p;
        }
        q
    }

    fn mutual_information(&self) -> f64 {
        let q = self.output_marginal();
        let mut total = 0.0;
        for s in 0..self.probs.len() {
            let ps = self.probs[s];
            if ps == 0.0 {
                continue;
            }
            for &(w, p) in self.row(s) {
                if p > 0.0 {
                    total += ps * p * (p / q[w as usize]).ln();
                }
            }
        }
        total.max(0.0)
    }

    fn output_entropy(&self) -> f64 {
        self.output_marginal().iter().filter(|&&q| q > 0.0).map(|&q| -q * q.ln()).sum()
    }
}

/// Exact joint law of `(w_S, S)` for a learner on `D(p)^m`.
#[derive(Debug, Clone)]
pub struct Channel {
    d: usize,
    m: usize,
    prefix: usize,
    reduction: Reduction,
    optimum: Vec<f64>,
    total_variance: f64,
    learner_deterministic: bool,
    blocks: Vec<Block>,
}

type Enumerated = (f64, Vec<u32>, Vec<(Vec<f64>, f64)>);

fn binomial_pmf(k: usize, c: usize, q: f64) -> f64 {
    let mut coef: u128 = 1;
    for i in 1..=c {
        coef = coef * (k - c + i) as u128 / i as u128;
    }
    coef as f64 * q.powi(c as i32) * (1.0 - q).powi((k - c) as i32)
}

fn build_block<F>(coords: Vec<usize>, n: usize, exec: Execution, f: F) -> Result<Block>
where
    F: Fn(usize) -> Result<Enumerated> + Sync + Send,
{
    let raw: Vec<Result<Enumerated>> = map_indexed(n, exec, f);
    let mut index: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut outputs: Vec<Vec<f64>> = Vec::new();
    let mut probs = Vec::with_capacity(n);
    let mut counts = Vec::with_capacity(n * coords.len());
    let mut row_start = vec![0];
    let mut entries = Vec::new();
    for item in raw {
        let (prob, c, law) = item?;
        probs.push(prob);
        counts.extend(c);
        for (w, p) in law {
            let key: Vec<u64> = w.iter().map(|&x| if x == 0.0 { 0 } else { x.to_bits() }).collect();
            let next = outputs.len() as u32;
            let idx = *index.entry(key).or_insert_with(|| {
                outputs.push(w);
                next
            });
            entries.push((idx, p));
        }
        row_start.push(entries.len());
    }
    let mut order: Vec<usize> = (0..outputs.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&outputs[a], &outputs[b]));
    let mut rank = vec![0u32; outputs.len()];
    for (r, &o) in order.iter().enumerate() {
        rank[o] = r as u32;
    }
    entries.iter_mut().for_each(|e| e.0 = rank[e.0 as usize]);
    let outputs = order.iter().map(|&o| outputs[o].clone()).collect();
    Ok(Block { coords, probs, counts, row_start, entries, outputs })
}

/// [`exact_channel_with_budget`] at the default budget with parallel execution.
pub fn exact_channel(learner: &Learner, inst: &HardInstance) -> Result<Channel> {
    exact_channel_with_budget(learner, inst, ENUMERATION_BUDGET, Execution::default())
}

/// Enumerate the sample space exactly.
///
/// Only the first `learner.prefix_len()` points are enumerated. Mean-measurable
/// learners use one representative per count vector when `(k+1)^d` fits the budget;
/// otherwise all `2^(dk)` patterns are enumerated, and coordinate-factorized learners
/// fall back to `d` independent blocks of `2^k` columns.
pub fn exact_channel_with_budget(
    learner: &Learner,
    inst: &HardInstance,
    budget: u128,
    exec: Execution,
) -> Result<Channel> {
    build_channel(learner, inst, budget, exec, None)
}

/// Enumerate with a fixed reduction, for cross-checking the reductions against each other.
pub fn exact_channel_forced(
    learner: &Learner,
    inst: &HardInstance,
    reduction: Reduction,
    exec: Execution,
) -> Result<Channel> {
    build_channel(learner, inst, ENUMERATION_BUDGET, exec, Some(reduction))
}

fn build_channel(
    learner: &Learner,
    inst: &HardInstance,
    budget: u128,
    exec: Execution,
    forced: Option<Reduction>,
) -> Result<Channel> {
    let allow = |r: Reduction| forced.is_none_or(|f| f == r);
    let d = inst.d();
    if learner.d() != d {
        return Err(Error::DimensionMismatch { expected: learner.d(), got: d });
    }
    let m = learner.m();
    let k = learner.prefix_len();
    let q: Vec<f64> = (0..d).map(|t| inst.plus_prob(t)).collect();
    let counts_size = ((k + 1) as u128).saturating_pow(d as u32);
    let full_bits = (d * k) as u32;
    let full_size = if full_bits >= 127 { u128::MAX } else { 1u128 << full_bits };
    let all: Vec<usize> = (0..d).collect();

    let (reduction, blocks) = if allow(Reduction::Counts) && learner.is_mean_measurable() && counts_size <= budget {
        let base = k + 1;
        let block = build_block(all, counts_size as usize, exec, |idx| {
            let mut rest = idx;
            let mut counts = Vec::with_capacity(d);
            let mut prob = 1.0;
            for &qt in &q {
                let c = rest % base;
                rest /= base;
                prob *= binomial_pmf(k, c, qt);
                counts.push(c);
            }
            let law = learner.law_of_prefix(&Sample::with_counts(k, &counts))?;
            let c32 = counts.iter().map(|&c| c as u32).collect();
            Ok((prob, c32, law.into_iter().map(|(w, p)| (w.into_vec(), p)).collect()))
        })?;
        (Reduction::Counts, vec![block])
    } else if allow(Reduction::Full) && full_size <= budget {
        let block = build_block(all, full_size as usize, exec, |idx| {
            let s = Sample::from_bits(d, k, idx as u64);
            let prob = inst.sample_prob(&s);
            let law = learner.law_of_prefix(&s)?;
            let c32 = s.plus_counts().iter().map(|&c| c as u32).collect();
            Ok((prob, c32, law.into_iter().map(|(w, p)| (w.into_vec(), p)).collect()))
        })?;
        (Reduction::Full, vec![block])
    } else if allow(Reduction::Factorized) && learner.is_coordinate_factorized() && k < 64 && (1u128 << k) <= budget {
        let n = 1usize << k;
        let mut blocks = Vec::with_capacity(d);
        for t in 0..d {
            blocks.push(build_block(vec![t], n, exec, |bits| {
                let mut signs = vec![-1i8; d * k];
                let mut prob = 1.0;
                for i in 0..k {
                    if bits >> i & 1 == 1 {
                        signs[i * d + t] = 1;
                        prob *= q[t];
                    } else {
                        prob *= 1.0 - q[t];
                    }
                }
                let s = Sample::from_signs(d, k, signs)?;
                let law = learner.law_of_prefix(&s)?;
                let law = law.into_iter().map(|(w, p)| (vec![w.as_slice()[t]], p)).collect();
                Ok((prob, vec![bits.count_ones()], law))
            })?);
        }
        (Reduction::Factorized, blocks)
    } else {
        return Err(Error::BudgetExceeded { needed: full_size, budget });
    };

    Ok(Channel {
        d,
        m,
        prefix: k,
        reduction,
        optimum: inst.optimum(),
        total_variance: inst.total_variance(),
        learner_deterministic: learner.is_deterministic(),
        blocks,
    })
}

fn sparse_mi(cells: &BTreeMap<(u64, u64), f64>) -> f64 {
    let mut a: BTreeMap<u64, f64> = BTreeMap::new();
    let mut b: BTreeMap<u64, f64> = BTreeMap::new();
    for (&(x, y), &p) in cells {
        *a.entry(x).or_default() += p;
        *b.entry(y).or_default() += p;
    }
    let mut total = 0.0;
    for (&(x, y), &p) in cells {
        if p > 0.0 {
            total += p * (p / (a[&x] * b[&y])).ln();
        }
    }
    total.max(0.0)
}

impl Channel {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn reduction(&self) -> Reduction {
        self.reduction
    }

    /// Number of enumerated sample statistics summed over blocks.
    pub fn sample_count(&self) -> usize {
        self.blocks.iter().map(|b| b.probs.len()).sum()
    }

    /// Number of distinct outputs; a product over blocks when factorized.
    pub fn output_count(&self) -> u128 {
        self.blocks.iter().map(|b| b.outputs.len() as u128).product()
    }

    /// `I(w_S; S)` in nats.
    pub fn mutual_information(&self) -> f64 {
        self.blocks.iter().map(Block::mutual_information).sum()
    }

    /// Per-coordinate MI for factorized channels, or the single total otherwise.
    pub fn block_mutual_information(&self) -> Vec<f64> {
        self.blocks.iter().map(Block::mutual_information).collect()
    }

    /// `H(w_S)` in nats.
    pub fn output_entropy(&self) -> f64 {
        self.blocks.iter().map(Block::output_entropy).sum()
    }

    /// `E[Δ_D(w_S)] = E‖w_S − w★‖²`.
    pub fn expected_suboptimality(&self) -> f64 {
        let mut total = 0.0;
        for b in &self.blocks {
            for (_, w, p) in b.cells() {
                let out = &b.outputs[w as usize];
                let sq: f64 = b.coords.iter().zip(out).map(|(&t, &x)| (x - self.optimum[t]).powi(2)).sum();
                total += p * sq;
            }
        }
        total
    }

    /// `E[L_D(w_S) − L_S(w_S)] = 2 E[w_S · (z̄ − w★)]`. Points beyond the prefix are
    /// independent of the output and contribute nothing beyond the `k/m` weight.
    pub fn expected_gap(&self) -> f64 {
        let mut total = 0.0;
        for b in &self.blocks {
            for (s, w, p) in b.cells() {
                let out = &b.outputs[w as usize];
                let counts = b.count_row(s);
                let mut dot = 0.0;
                for ((&t, &x), &c) in b.coords.iter().zip(out).zip(counts) {
                    dot += x * (count_coordinate(c as usize, self.prefix, self.d) - self.optimum[t]);
                }
                total += p * 2.0 * dot;
            }
        }
        total * self.prefix as f64 / self.m as f64
    }

    /// `E[Δ_S(w_S)] = E[Δ_D] − E[gap] + E‖z̄ − w★‖²`.
    pub fn expected_empirical_suboptimality(&self) -> f64 {
        self.expected_suboptimality() - self.expected_gap() + self.total_variance / self.m as f64
    }

    /// `(I(w_S; Σ_i z_i), Σ_t I(w_S(t); Σ_i z_i(t)))`.
    pub fn chain_rule_terms(&self) -> Result<(f64, f64)> {
        if self.prefix != self.m {
            return Err(Error::InvalidParameter(
                "chain rule terms need a channel over the full sample".into(),
            ));
        }
        let mut joint_total = 0.0;
        let mut per_coord = 0.0;
        for b in &self.blocks {
            let mut count_ids: HashMap<&[u32], u64> = HashMap::new();
            let mut joint: BTreeMap<(u64, u64), f64> = BTreeMap::new();
            let mut coord: Vec<BTreeMap<(u64, u64), f64>> = vec![BTreeMap::new(); b.width()];
            for (s, w, p) in b.cells() {
                let row = b.count_row(s);
                let next = count_ids.len() as u64;
                let cid = *count_ids.entry(row).or_insert(next);
                *joint.entry((w as u64, cid)).or_default() += p;
                let out = &b.outputs[w as usize];
                for j in 0..b.width() {
                    let key = if out[j] == 0.0 { 0 } else { out[j].to_bits() };
                    *coord[j].entry((key, row[j] as u64)).or_default() += p;
                }
            }
            joint_total += if self.reduction == Reduction::Counts { b.mutual_information() } else { sparse_mi(&joint) };
            per_coord += coord.iter().map(sparse_mi).sum::<f64>();
        }
        Ok((joint_total, per_coord))
    }

    /// Check that sample masses and every conditional row are valid pmfs, and that
    /// rows of deterministic learners are point masses.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for b in &self.blocks {
            let total: f64 = b.probs.iter().sum();
            if (total - 1.0).abs() > tol {
                return Err(Error::InvalidPmf(format!("sample masses sum to {total}")));
            }
            for s in 0..b.probs.len() {
                let row = b.row(s);
                let mass: f64 = row.iter().map(|e| e.1).sum();
                if (mass - 1.0).abs() > tol || row.iter().any(|e| e.1 < 0.0) {
                    return Err(Error::InvalidPmf(format!("row {s} sums to {mass}")));
                }
                if self.learner_deterministic && row.len() != 1 {
                    return Err(Error::InvalidPmf(format!("row {s} of a deterministic learner is not a point mass")));
                }
            }
        }
        Ok(())
    }

    /// CSV `sample_index,output_index,probability` of the conditional rows. Blocks of a
    /// factorized channel are listed one after another with offset indices.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_index,output_index,probability\n");
        let (mut s_off, mut w_off) = (0, 0);
        for b in &self.blocks {
            for s in 0..b.probs.len() {
                for &(w, p) in b.row(s) {
                    out.push_str(&format!("{},{},{:.16e}\n", s + s_off, w as usize + w_off, p));
                }
            }
            s_off += b.probs.len();
            w_off += b.outputs.len();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::LearnerSpec;

    fn channel(spec: LearnerSpec, p: Vec<f64>, m: usize) -> Channel {
        let inst = HardInstance::new(p).unwrap();
        exact_channel(&spec.compile(inst.d(), m).unwrap(), &inst).unwrap()
    }

    #[test]
    fn mean_channel_d1_m2() {
        let ch = channel(LearnerSpec::Mean, vec![0.0], 2);
        assert_eq!(ch.reduction(), Reduction::Counts);
        assert!((ch.mutual_information() - 1.5 * 2f64.ln()).abs() < 1e-12);
        assert!((ch.expected_gap() - 1.0).abs() < 1e-12);
        assert!(ch.expected_empirical_suboptimality().abs() < 1e-12);
        ch.validate(1e-12).unwrap();
    }

    #[test]
    fn reductions_agree() {
        let inst = HardInstance::new(vec![0.2, -0.3]).unwrap();
        let l = LearnerSpec::QuantizedMean { delta: 0.3 }.compile(2, 3).unwrap();
        let counts = exact_channel_forced(&l, &inst, Reduction::Counts, Execution::Sequential).unwrap();
        let full = exact_channel_forced(&l, &inst, Reduction::Full, Execution::Sequential).unwrap();
        let fact = exact_channel_forced(&l, &inst, Reduction::Factorized, Execution::Sequential).unwrap();
        assert_eq!(counts.reduction(), Reduction::Counts);
        assert_eq!(full.reduction(), Reduction::Full);
        assert_eq!(fact.reduction(), Reduction::Factorized);
        for other in [&full, &fact] {
            assert!((counts.mutual_information() - other.mutual_information()).abs() < 1e-10);
            assert!((counts.expected_gap() - other.expected_gap()).abs() < 1e-12);
            assert!((counts.expected_suboptimality() - other.expected_suboptimality()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_and_full_noise_carry_no_information() {
        let ch = channel(LearnerSpec::Constant(vec![0.1, 0.2]), vec![0.1, 0.3], 3);
        assert_eq!(ch.mutual_information(), 0.0);
        let rr = LearnerSpec::RandomizedResponse { rho: 1.0, base: Box::new(LearnerSpec::Mean) };
        let ch = channel(rr, vec![0.1, 0.3], 3);
        assert!(ch.mutual_information().abs() < 1e-12);
        ch.validate(1e-12).unwrap();
    }

    #[test]
    fn budget_exceeded_for_unfactorizable_learner() {
        let inst = HardInstance::unbiased(6).unwrap();
        let l = LearnerSpec::EpsilonNetErm.compile(6, 5).unwrap();
        assert!(matches!(
            exact_channel_with_budget(&l, &inst, 1 << 10, Execution::Sequential),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn subsample_gap_scales_with_prefix() {
        let inst = HardInstance::new(vec![0.25]).unwrap();
        let sub = LearnerSpec::Subsample { k: 2, base: Box::new(LearnerSpec::Mean) };
        let ch = channel(sub, vec![0.25], 6);
        let base = channel(LearnerSpec::Mean, vec![0.25], 2);
        assert!((ch.expected_gap() - base.expected_gap() / 3.0).abs() < 1e-12);
        assert!((ch.mutual_information() - base.mutual_information()).abs() < 1e-12);
        assert!((ch.expected_gap() - 2.0 * inst.total_variance() / 6.0).abs() < 1e-12);
    }

    #[test]
    fn csv_header_and_rows() {
        let ch = channel(LearnerSpec::Mean, vec![0.0], 2);
        let csv = ch.to_csv();
        assert!(csv.starts_with("sample_index,output_index,probability\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
