//! Gauss–Legendre quadrature.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Nodes are the roots of `P_n`, found by Newton iteration from the Chebyshev-like
/// initial guess; weights are `2 / ((1 - x^2) P_n'(x)^2)`. Nodes are returned in
/// increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// `∫_a^b f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .collect();
        half * crate::parallel::pairwise_sum(&terms)
    }

    /// Expectation of `f(P)` for `P` uniform on `[a, b]`.
    pub fn uniform_expectation<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.integrate(a, b, f) / (b - a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let g = GaussLegendre::new(2);
        let r = 1.0 / 3f64.sqrt();
        assert!((g.nodes[0] + r).abs() < 1e-15);
        assert!((g.nodes[1] - r).abs() < 1e-15);
        assert!((g.weights[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn three_point_rule() {
        let g = GaussLegendre::new(3);
        assert!((g.nodes[2] - 0.6f64.sqrt()).abs() < 1e-15);
        assert_eq!(g.nodes[1], 0.0);
        assert!((g.weights[1] - 8.0 / 9.0).abs() < 1e-14);
        assert!((g.weights[0] - 5.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        // ∫_{-1}^{1} x^k dx = 2/(k+1) for even k, 0 for odd k.
        let n = 64;
        let g = GaussLegendre::new(n);
        assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        for k in 0..(2 * n - 1).min(40) {
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            let got = g.integrate(-1.0, 1.0, |x| x.powi(k as i32));
            assert!((got - exact).abs() < 1e-13, "k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn uniform_second_moment_on_prior_interval() {
        let g = GaussLegendre::new(64);
        let v = g.uniform_expectation(-1.0 / 3.0, 1.0 / 3.0, |p| p * p);
        assert!((v - 1.0 / 27.0).abs() < 1e-15);
    }
}
