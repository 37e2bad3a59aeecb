use super::measures::total_variation;
use super::pmf::{FinitePmf, JointPmf};
use crate::error::{Error, Result};

/// A maximal coupling of `p1` and `p2`: diagonal mass `min(p1, p2)`, residual mass
/// spread as the normalised outer product of `(p1 − p2)⁺` and `(p2 − p1)⁺`.
///
/// The disagreement probability `P(X₁ ≠ X₂)` of the result equals `TV(p1, p2)`.
pub fn optimal_coupling(p1: &FinitePmf, p2: &FinitePmf) -> Result<JointPmf> {
    p1.same_alphabet(p2)?;
    let n = p1.len();
    let a = p1.probs();
    let b = p2.probs();
    let mut table = vec![0.0; n * n];
    for i in 0..n {
        table[i * n + i] = a[i].min(b[i]);
    }
    let excess: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).max(0.0)).collect();
    let deficit: Vec<f64> = a.iter().zip(b).map(|(x, y)| (y - x).max(0.0)).collect();
    let tv = total_variation(p1, p2)?;
    if tv > 0.0 {
        for i in 0..n {
            if excess[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                table[i * n + j] += excess[i] * deficit[j] / tv;
            }
        }
    }
    let total: f64 = table.iter().sum();
    table.iter_mut().for_each(|v| *v /= total);
    JointPmf::new(p1.outcomes().to_vec(), p2.outcomes().to_vec(), table)
}

/// Feasible coupling built by the north-west corner rule after reordering both
/// alphabets. Every order pair gives a vertex of the transport polytope.
pub fn corner_coupling(p1: &FinitePmf, p2: &FinitePmf, order1: &[usize], order2: &[usize]) -> Result<JointPmf> {
    p1.same_alphabet(p2)?;
    let n = p1.len();
    let is_perm = |o: &[usize]| {
        let mut seen = vec![false; n];
        o.len() == n && o.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
    };
    if !is_perm(order1) || !is_perm(order2) {
        return Err(Error::InvalidParameter("orders must be permutations of the alphabet".into()));
    }
    let mut a: Vec<f64> = order1.iter().map(|&i| p1.probs()[i]).collect();
    let mut b: Vec<f64> = order2.iter().map(|&j| p2.probs()[j]).collect();
    let mut table = vec![0.0; n * n];
    let (mut i, mut j) = (0, 0);
    while i < n && j < n {
        let mass = a[i].min(b[j]);
        table[order1[i] * n + order2[j]] += mass;
        a[i] -= mass;
        b[j] -= mass;
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    // Absorb round-off on the last cell.
    let rest_a: f64 = a.iter().sum();
    if rest_a > 0.0 {
        table[order1[n - 1] * n + order2[n - 1]] += rest_a;
    }
    let total: f64 = table.iter().sum();
    table.iter_mut().for_each(|v| *v /= total);
    JointPmf::new(p1.outcomes().to_vec(), p2.outcomes().to_vec(), table)
}

/// `P(X₁ ≠ X₂)` for a joint over a shared alphabet.
pub fn disagreement_probability(j: &JointPmf) -> Result<f64> {
    if j.x_outcomes() != j.y_outcomes() {
        return Err(Error::AlphabetMismatch("coupling axes differ".into()));
    }
    let n = j.nx();
    let diag: f64 = (0..n).map(|i| j.get(i, i)).sum();
    Ok((1.0 - diag).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_is_diagonal() {
        let p = FinitePmf::from_probs(vec![0.2, 0.3, 0.5]).unwrap();
        let c = optimal_coupling(&p, &p).unwrap();
        assert_eq!(disagreement_probability(&c).unwrap(), 0.0);
        assert_eq!(c.get(1, 1), 0.3);
    }

    #[test]
    fn bernoulli_pair() {
        let a = FinitePmf::bernoulli(0.5).unwrap();
        let b = FinitePmf::bernoulli(0.25).unwrap();
        let c = optimal_coupling(&a, &b).unwrap();
        assert!((disagreement_probability(&c).unwrap() - 0.25).abs() < 1e-15);
        let mx = c.x_marginal();
        let my = c.y_marginal();
        for i in 0..2 {
            assert!((mx.probs()[i] - a.probs()[i]).abs() < 1e-15);
            assert!((my.probs()[i] - b.probs()[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn disjoint_point_masses() {
        let a = FinitePmf::point_mass(3, 0).unwrap();
        let b = FinitePmf::point_mass(3, 2).unwrap();
        let c = optimal_coupling(&a, &b).unwrap();
        assert_eq!(disagreement_probability(&c).unwrap(), 1.0);
    }

    #[test]
    fn corner_rule_is_feasible_and_never_better() {
        let a = FinitePmf::from_probs(vec![0.1, 0.6, 0.3]).unwrap();
        let b = FinitePmf::from_probs(vec![0.5, 0.25, 0.25]).unwrap();
        let tv = total_variation(&a, &b).unwrap();
        for (o1, o2) in [([0, 1, 2], [0, 1, 2]), ([2, 0, 1], [1, 2, 0]), ([1, 0, 2], [0, 2, 1])] {
            let c = corner_coupling(&a, &b, &o1, &o2).unwrap();
            for i in 0..3 {
                assert!((c.x_marginal().probs()[i] - a.probs()[i]).abs() < 1e-15);
                assert!((c.y_marginal().probs()[i] - b.probs()[i]).abs() < 1e-15);
            }
            assert!(disagreement_probability(&c).unwrap() >= tv - 1e-15);
        }
        assert!(corner_coupling(&a, &b, &[0, 0, 1], &[0, 1, 2]).is_err());
    }
}
