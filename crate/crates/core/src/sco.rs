//! The hard stochastic convex optimization instance.
//!
//! For a bias vector `p ∈ [−1/3, 1/3]^d` the distribution `D(p)` draws
//! `z ∈ {−1/√d, +1/√d}^d` with independent coordinates and `E[√d · z(t)] = p(t)`.
//! The loss is `f(w, z) = ‖w − z‖²` over the unit ball, which gives closed forms
//! for every risk: `L_D(w) = ‖w − w★‖² + 1 − ‖w★‖²` with `w★ = p/√d`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::PROB_TOLERANCE;

pub const MAX_BIAS: f64 = 1.0 / 3.0;

/// Range of the loss on the unit ball times the unit sphere.
pub const LOSS_RANGE: f64 = 4.0;

/// Lipschitz constant of the loss in `w` on the unit ball.
pub const LIPSCHITZ: f64 = 4.0;

pub fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Scale onto the unit ball if outside it.
pub fn project_to_ball(mut v: Vec<f64>) -> Vec<f64> {
    let n = norm_sq(&v).sqrt();
    if n > 1.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

/// Coordinate value `sum_signs / (m √d)` of a sample mean. Every learner and codebook
/// that produces means goes through this one function so that results agree bitwise.
#[inline]
pub fn mean_coordinate(sum_signs: i64, m: usize, d: usize) -> f64 {
    sum_signs as f64 / (m as f64 * (d as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardInstance {
    d: usize,
    p: Vec<f64>,
}

impl HardInstance {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidInstance("dimension must be at least 1".into()));
        }
        if let Some(b) = p.iter().find(|b| !b.is_finite() || b.abs() > MAX_BIAS + 1e-15) {
            return Err(Error::InvalidInstance(format!("bias {b} outside [-1/3, 1/3]")));
        }
        Ok(HardInstance { d: p.len(), p })
    }

    pub fn unbiased(d: usize) -> Result<Self> {
        Self::new(vec![0.0; d])
    }

    /// `p` drawn uniformly from `[−1/3, 1/3]^d`.
    pub fn uniform_prior<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        Self::new((0..d).map(|_| rng.gen_range(-MAX_BIAS..=MAX_BIAS)).collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Probability that coordinate `t` equals `+1/√d`.
    pub fn plus_prob(&self, t: usize) -> f64 {
        0.5 * (1.0 + self.p[t])
    }

    /// The population minimiser `w★ = E[z] = p/√d`.
    pub fn optimum(&self) -> Vec<f64> {
        let s = (self.d as f64).sqrt();
        self.p.iter().map(|b| b / s).collect()
    }

    /// Per-point coordinate variance summed over coordinates: `1 − ‖p‖²/d`.
    pub fn total_variance(&self) -> f64 {
        1.0 - norm_sq(&self.p) / self.d as f64
    }

    /// `E‖z̄ − w★‖²` for a sample of size `m`.
    pub fn mean_estimator_risk(&self, m: usize) -> f64 {
        self.total_variance() / m as f64
    }

    fn check_dim(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: w.len() });
        }
        Ok(())
    }

    /// Draw `m` i.i.d. points from `D(p)`.
    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<Sample> {
        if m == 0 {
            return Err(Error::InvalidSample("sample size must be at least 1".into()));
        }
        let mut signs = Vec::with_capacity(m * self.d);
        for _ in 0..m {
            for t in 0..self.d {
                signs.push(if rng.gen::<f64>() < self.plus_prob(t) { 1 } else { -1 });
            }
        }
        Ok(Sample { d: self.d, m, signs })
    }

    /// `L_D(w) = ‖w − w★‖² + 1 − ‖w★‖²`.
    pub fn population_risk(&self, w: &[f64]) -> Result<f64> {
        self.check_dim(w)?;
        let opt = self.optimum();
        Ok(dist_sq(w, &opt) + 1.0 - norm_sq(&opt))
    }

    /// `Δ_D(w) = ‖w − w★‖²`.
    pub fn suboptimality(&self, w: &[f64]) -> Result<f64> {
        self.check_dim(w)?;
        Ok(dist_sq(w, &self.optimum()))
    }

    /// Probability of a sign pattern under `D(p)^m`.
    pub fn sample_prob(&self, s: &Sample) -> f64 {
        let mut prob = 1.0;
        for i in 0..s.m {
            for (t, &sg) in s.point_signs(i).iter().enumerate() {
                let q = self.plus_prob(t);
                prob *= if sg > 0 { q } else { 1.0 - q };
            }
        }
        prob
    }
}

/// `f(w, z) = ‖w − z‖²`.
pub fn loss(w: &[f64], z: &[f64]) -> Result<f64> {
    if w.len() != z.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), got: z.len() });
    }
    Ok(dist_sq(w, z))
}

/// A sample of `m` points in `{−1/√d, +1/√d}^d`, stored as signs, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sample {
    d: usize,
    m: usize,
    signs: Vec<i8>,
}

impl Sample {
    pub fn from_signs(d: usize, m: usize, signs: Vec<i8>) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(Error::InvalidSample("empty sample".into()));
        }
        if signs.len() != d * m {
            return Err(Error::InvalidSample(format!("{} signs for {m} points of dimension {d}", signs.len())));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidSample("signs must be ±1".into()));
        }
        Ok(Sample { d, m, signs })
    }

    /// Sample whose index `bits` encodes the signs: bit `i*d + t` set means `+1`.
    pub fn from_bits(d: usize, m: usize, bits: u64) -> Sample {
        let signs = (0..d * m).map(|k| if bits >> k & 1 == 1 { 1 } else { -1 }).collect();
        Sample { d, m, signs }
    }

    /// A sample with `counts[t]` plus signs in coordinate `t`, placed first.
    pub fn with_counts(m: usize, counts: &[usize]) -> Sample {
        let d = counts.len();
        let mut signs = vec![-1i8; d * m];
        for (t, &k) in counts.iter().enumerate() {
            for i in 0..k {
                signs[i * d + t] = 1;
            }
        }
        Sample { d, m, signs }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn point_signs(&self, i: usize) -> &[i8] {
        &self.signs[i * self.d..(i + 1) * self.d]
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        let s = 1.0 / (self.d as f64).sqrt();
        self.point_signs(i).iter().map(|&g| g as f64 * s).collect()
    }

    /// `Σ_i sign_i(t)` for every coordinate.
    pub fn sign_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.d];
        for row in self.signs.chunks(self.d) {
            for (s, &g) in sums.iter_mut().zip(row) {
                *s += g as i64;
            }
        }
        sums
    }

    /// Number of `+1` signs per coordinate.
    pub fn plus_counts(&self) -> Vec<usize> {
        self.sign_sums()
            .iter()
            .map(|&s| ((s + self.m as i64) / 2) as usize)
            .collect()
    }

    /// `z̄ = (1/m) Σ z_i`.
    pub fn mean(&self) -> Vec<f64> {
        self.sign_sums().iter().map(|&s| mean_coordinate(s, self.m, self.d)).collect()
    }

    /// The first `k` points.
    pub fn prefix(&self, k: usize) -> Result<Sample> {
        if k == 0 || k > self.m {
            return Err(Error::InvalidParameter(format!("prefix length {k} outside 1..={}", self.m)));
        }
        Ok(Sample { d: self.d, m: k, signs: self.signs[..k * self.d].to_vec() })
    }

    /// `(1/m) Σ f(w, z_i) = ‖w‖² − 2 w·z̄ + 1`.
    pub fn empirical_risk(&self, w: &[f64]) -> Result<f64> {
        if w.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: w.len() });
        }
        let zbar = self.mean();
        let dot: f64 = w.iter().zip(&zbar).map(|(a, b)| a * b).sum();
        Ok(norm_sq(w) - 2.0 * dot + 1.0)
    }

    /// Empirical risk computed point by point, for cross-checking the closed form.
    pub fn empirical_risk_direct(&self, w: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..self.m {
            total += loss(w, &self.point(i))?;
        }
        Ok(total / self.m as f64)
    }

    /// `Δ_S(w) = ‖w − z̄‖²`; the empirical minimiser over the ball is `z̄` itself.
    pub fn empirical_suboptimality(&self, w: &[f64]) -> Result<f64> {
        if w.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: w.len() });
        }
        Ok(dist_sq(w, &self.mean()))
    }

    /// CSV with header `z_1,...,z_d` and one row of `±1` per point.
    pub fn to_csv(&self) -> String {
        let header: Vec<String> = (1..=self.d).map(|t| format!("z_{t}")).collect();
        let mut out = header.join(",");
        out.push('\n');
        for row in self.signs.chunks(self.d) {
            let cells: Vec<String> = row.iter().map(|g| g.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Sample> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        for (t, c) in cols.iter().enumerate() {
            if *c != format!("z_{}", t + 1) {
                return Err(Error::Parse(format!("unexpected header column {c:?}")));
            }
        }
        let d = cols.len();
        let mut signs = Vec::new();
        let mut m = 0;
        for line in lines {
            let row: Vec<&str> = line.split(',').map(str::trim).collect();
            if row.len() != d {
                return Err(Error::Parse(format!("row {} has {} cells, expected {d}", m + 1, row.len())));
            }
            for cell in row {
                let v: i8 = cell.parse().map_err(|e| Error::Parse(format!("{cell:?}: {e}")))?;
                signs.push(v);
            }
            m += 1;
        }
        Sample::from_signs(d, m, signs)
    }
}

/// A point of the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter(pub(crate) Vec<f64>);

impl Parameter {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        let n = norm_sq(&w);
        if w.iter().any(|x| !x.is_finite()) || n > 1.0 + PROB_TOLERANCE {
            return Err(Error::InvalidParameter(format!("‖w‖² = {n} outside the unit ball")));
        }
        Ok(Parameter(w))
    }

    pub fn zeros(d: usize) -> Self {
        Parameter(vec![0.0; d])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Bit pattern of the coordinates with `-0.0` folded into `0.0`; used as an
    /// exact hash key for codebook lookups.
    pub fn key(&self) -> Vec<u64> {
        self.0.iter().map(|&x| if x == 0.0 { 0 } else { x.to_bits() }).collect()
    }
}

impl AsRef<[f64]> for Parameter {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
