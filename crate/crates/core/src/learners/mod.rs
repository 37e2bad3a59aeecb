//! Discrete-output learners on the hard instance and their exact output channels.
//!
//! Every learner is forced onto a finite codebook so that the joint law of
//! `(w_S, S)` can be enumerated. [`LearnerSpec`] is the configuration value;
//! [`LearnerSpec::compile`] fixes `(d, m)` and precomputes nets once.

mod channel;

pub use channel::{exact_channel, exact_channel_forced, exact_channel_with_budget, Channel, Reduction, ENUMERATION_BUDGET};

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sco::{dist_sq, mean_coordinate, norm_sq, project_to_ball, Parameter, Sample};

/// Codebooks above this many entries are not materialised.
pub const CODEBOOK_BUDGET: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub enum LearnerSpec {
    /// Empirical mean `z̄`, the exact ERM.
    Mean,
    /// `z̄` rounded to the grid `δℤ^d` and projected to the ball.
    QuantizedMean { delta: f64 },
    /// ERM over an axis grid of spacing `2/⌈√m⌉`.
    EpsilonNetErm,
    /// One pass of projected SGD with `η_t = 1/(2t)`, averaged, quantized at `1/m²`.
    Sgd,
    /// `z̄/(1+λ)` quantized at `1/m²`.
    RegularizedErm { lambda: f64 },
    /// `base` applied to the first `k` points.
    Subsample { k: usize, base: Box<LearnerSpec> },
    /// `base` with probability `1−ρ`, otherwise a uniform codebook entry.
    RandomizedResponse { rho: f64, base: Box<LearnerSpec> },
    /// Ignores the sample.
    Constant(Vec<f64>),
    /// `sign(z̄(t))/(3√d)` on one coordinate and zero elsewhere.
    CoordinateSign { coordinate: usize },
}

impl LearnerSpec {
    pub fn name(&self) -> String {
        match self {
            LearnerSpec::Mean => "mean".into(),
            LearnerSpec::QuantizedMean { delta } => format!("quantized_mean(delta={delta})"),
            LearnerSpec::EpsilonNetErm => "epsilon_net_erm".into(),
            LearnerSpec::Sgd => "sgd".into(),
            LearnerSpec::RegularizedErm { lambda } => format!("regularized_erm(lambda={lambda})"),
            LearnerSpec::Subsample { k, base } => format!("subsample(k={k},{})", base.name()),
            LearnerSpec::RandomizedResponse { rho, base } => {
                format!("randomized_response(rho={rho},{})", base.name())
            }
            LearnerSpec::Constant(_) => "constant".into(),
            LearnerSpec::CoordinateSign { coordinate } => format!("coordinate_sign(t={coordinate})"),
        }
    }

    pub fn compile(&self, d: usize, m: usize) -> Result<Learner> {
        if d == 0 || m == 0 {
            return Err(Error::InvalidParameter("learner needs d ≥ 1 and m ≥ 1".into()));
        }
        let kind = match self {
            LearnerSpec::Mean => Kind::Mean,
            LearnerSpec::QuantizedMean { delta } => {
                check_delta(*delta)?;
                Kind::QuantizedMean { delta: *delta }
            }
            LearnerSpec::EpsilonNetErm => Kind::Net(epsilon_net(d, m)),
            LearnerSpec::Sgd => Kind::Sgd,
            LearnerSpec::RegularizedErm { lambda } => {
                if !(lambda.is_finite() && *lambda >= 0.0) {
                    return Err(Error::InvalidParameter(format!("λ = {lambda} must be ≥ 0")));
                }
                Kind::Regularized { lambda: *lambda }
            }
            LearnerSpec::Subsample { k, base } => {
                if *k == 0 || *k > m {
                    return Err(Error::InvalidParameter(format!("subsample size {k} outside 1..={m}")));
                }
                Kind::Subsample { k: *k, base: Box::new(base.compile(d, *k)?) }
            }
            LearnerSpec::RandomizedResponse { rho, base } => {
                check_rho(*rho)?;
                let base = base.compile(d, m)?;
                let codebook = base.codebook()?;
                Kind::RandomizedResponse { rho: *rho, base: Box::new(base), codebook }
            }
            LearnerSpec::Constant(w) => {
                if w.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: w.len() });
                }
                Kind::Constant(Parameter::new(w.clone())?)
            }
            LearnerSpec::CoordinateSign { coordinate } => {
                if *coordinate >= d {
                    return Err(Error::InvalidParameter(format!("coordinate {coordinate} ≥ d = {d}")));
                }
                Kind::CoordinateSign { t: *coordinate }
            }
        };
        Ok(Learner { spec: self.clone(), d, m, kind })
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter(format!("δ = {delta} must be > 0")));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("ρ = {rho} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Kind {
    Mean,
    QuantizedMean { delta: f64 },
    Net(Vec<Parameter>),
    Sgd,
    Regularized { lambda: f64 },
    Subsample { k: usize, base: Box<Learner> },
    RandomizedResponse { rho: f64, base: Box<Learner>, codebook: Vec<Parameter> },
    Constant(Parameter),
    CoordinateSign { t: usize },
}

/// A learner specialised to dimension `d` and sample size `m`.
#[derive(Debug, Clone)]
pub struct Learner {
    spec: LearnerSpec,
    d: usize,
    m: usize,
    kind: Kind,
}

impl Learner {
    pub fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn check_sample(&self, s: &Sample) -> Result<()> {
        if s.d() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: s.d() });
        }
        if s.m() != self.m {
            return Err(Error::InvalidSample(format!("learner expects {} points, got {}", self.m, s.m())));
        }
        Ok(())
    }

    /// Number of leading points the output can depend on.
    pub fn prefix_len(&self) -> usize {
        match &self.kind {
            Kind::Subsample { base, .. } => base.prefix_len(),
            Kind::RandomizedResponse { base, .. } => base.prefix_len(),
            _ => self.m,
        }
    }

    /// Whether the output law depends on the prefix only through its sign counts.
    pub fn is_mean_measurable(&self) -> bool {
        match &self.kind {
            Kind::Sgd => false,
            Kind::Subsample { base, .. } | Kind::RandomizedResponse { base, .. } => base.is_mean_measurable(),
            _ => true,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        match &self.kind {
            Kind::RandomizedResponse { rho, base, .. } => *rho == 0.0 && base.is_deterministic(),
            Kind::Subsample { base, .. } => base.is_deterministic(),
            _ => true,
        }
    }

    /// Whether output coordinate `t` is a deterministic function of column `t` alone.
    pub fn is_coordinate_factorized(&self) -> bool {
        let edge = 1.0 / (self.d as f64).sqrt();
        let fits = |delta: f64, scale: f64| {
            let hi = quantize_coordinate(edge * scale, delta).abs();
            let lo = quantize_coordinate(-edge * scale, delta).abs();
            self.d as f64 * hi.max(lo).powi(2) <= 1.0
        };
        match &self.kind {
            Kind::Mean | Kind::Constant(_) | Kind::CoordinateSign { .. } => true,
            Kind::QuantizedMean { delta } => fits(*delta, 1.0),
            Kind::Sgd => fits(sgd_delta(self.m), 1.0),
            Kind::Regularized { lambda } => fits(sgd_delta(self.m), 1.0 / (1.0 + lambda)),
            Kind::Net(_) => self.d == 1,
            Kind::Subsample { base, .. } => base.is_coordinate_factorized(),
            Kind::RandomizedResponse { rho, base, .. } => *rho == 0.0 && base.is_coordinate_factorized(),
        }
    }

    /// Draw one output.
    pub fn run<R: Rng + ?Sized>(&self, s: &Sample, rng: &mut R) -> Result<Parameter> {
        self.check_sample(s)?;
        self.run_unchecked(s, rng)
    }

    fn run_unchecked<R: Rng + ?Sized>(&self, s: &Sample, rng: &mut R) -> Result<Parameter> {
        match &self.kind {
            Kind::Subsample { k, base } => base.run_unchecked(&s.prefix(*k)?, rng),
            Kind::RandomizedResponse { rho, base, codebook } => {
                if *rho > 0.0 && rng.gen::<f64>() < *rho {
                    Ok(codebook[rng.gen_range(0..codebook.len())].clone())
                } else {
                    base.run_unchecked(s, rng)
                }
            }
            _ => Ok(self.deterministic_output(s)),
        }
    }

    fn deterministic_output(&self, s: &Sample) -> Parameter {
        let m = s.m();
        match &self.kind {
            Kind::Mean => Parameter(project_to_ball(s.mean())),
            Kind::QuantizedMean { delta } => quantize_vec(&s.mean(), *delta),
            Kind::Net(net) => net_argmin(net, &s.mean()),
            Kind::Sgd => quantize_vec(&sgd_average(s), sgd_delta(m)),
            Kind::Regularized { lambda } => {
                let shrunk: Vec<f64> = s.mean().iter().map(|x| x / (1.0 + lambda)).collect();
                quantize_vec(&shrunk, sgd_delta(m))
            }
            Kind::Constant(w) => w.clone(),
            Kind::CoordinateSign { t } => {
                let d = s.d();
                let mut w = vec![0.0; d];
                w[*t] = s.sign_sums()[*t].signum() as f64 / (3.0 * (d as f64).sqrt());
                Parameter(w)
            }
            Kind::Subsample { .. } | Kind::RandomizedResponse { .. } => unreachable!("randomized kinds"),
        }
    }

    /// Exact conditional law of the output given the sample. Entries are merged by value.
    pub fn law(&self, s: &Sample) -> Result<Vec<(Parameter, f64)>> {
        self.check_sample(s)?;
        self.law_unchecked(s)
    }

    /// Law given only the first [`prefix_len`](Self::prefix_len) points.
    pub fn law_of_prefix(&self, prefix: &Sample) -> Result<Vec<(Parameter, f64)>> {
        if prefix.d() != self.d || prefix.m() != self.prefix_len() {
            return Err(Error::InvalidSample(format!(
                "prefix must have {} points of dimension {}",
                self.prefix_len(),
                self.d
            )));
        }
        self.law_prefix_unchecked(prefix)
    }

    fn law_prefix_unchecked(&self, prefix: &Sample) -> Result<Vec<(Parameter, f64)>> {
        match &self.kind {
            Kind::Subsample { base, .. } => base.law_prefix_unchecked(prefix),
            Kind::RandomizedResponse { rho, base, codebook } => {
                Ok(mix_uniform(base.law_prefix_unchecked(prefix)?, *rho, codebook))
            }
            _ => Ok(vec![(self.deterministic_output(prefix), 1.0)]),
        }
    }

    fn law_unchecked(&self, s: &Sample) -> Result<Vec<(Parameter, f64)>> {
        match &self.kind {
            Kind::Subsample { k, base } => base.law_unchecked(&s.prefix(*k)?),
            Kind::RandomizedResponse { rho, base, codebook } => {
                Ok(mix_uniform(base.law_unchecked(s)?, *rho, codebook))
            }
            _ => Ok(vec![(self.deterministic_output(s), 1.0)]),
        }
    }

    /// All outputs the learner can produce, sorted lexicographically and deduplicated.
    pub fn codebook(&self) -> Result<Vec<Parameter>> {
        let (d, m) = (self.d, self.m);
        let raw = match &self.kind {
            Kind::Net(net) => net.clone(),
            Kind::Constant(w) => vec![w.clone()],
            Kind::Subsample { base, .. } => base.codebook()?,
            Kind::RandomizedResponse { codebook, .. } => codebook.clone(),
            Kind::Sgd => {
                let delta = sgd_delta(m);
                let kmax = (1.0 / ((d as f64).sqrt() * delta)).ceil() as i64 + 1;
                let side = (2 * kmax + 1) as u128;
                check_codebook_budget(side.saturating_pow(d as u32))?;
                let values: Vec<f64> = (-kmax..=kmax).map(|k| k as f64 * delta).collect();
                product_grid(&values, d).into_iter().map(|v| Parameter(project_to_ball(v))).collect()
            }
            _ => {
                check_codebook_budget(((m + 1) as u128).saturating_pow(d as u32))?;
                let mut out = Vec::new();
                let mut counts = vec![0usize; d];
                loop {
                    out.push(self.deterministic_output(&Sample::with_counts(m, &counts)));
                    if !next_counts(&mut counts, m) {
                        break;
                    }
                }
                out
            }
        };
        Ok(sort_dedup(raw))
    }
}

fn check_codebook_budget(size: u128) -> Result<()> {
    if size > CODEBOOK_BUDGET {
        return Err(Error::BudgetExceeded { needed: size, budget: CODEBOOK_BUDGET });
    }
    Ok(())
}

/// Advance a mixed-radix counter with digits in `0..=m`; false after the last value.
pub(crate) fn next_counts(counts: &mut [usize], m: usize) -> bool {
    for c in counts.iter_mut() {
        if *c < m {
            *c += 1;
            return true;
        }
        *c = 0;
    }
    false
}

fn product_grid(values: &[f64], d: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(d)];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

fn sort_dedup(mut v: Vec<Parameter>) -> Vec<Parameter> {
    v.iter_mut().for_each(|w| w.0.iter_mut().for_each(|x| *x += 0.0));
    v.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    v.dedup_by(|a, b| a.key() == b.key());
    v
}

fn mix_uniform(base: Vec<(Parameter, f64)>, rho: f64, codebook: &[Parameter]) -> Vec<(Parameter, f64)> {
    if rho == 0.0 {
        return base;
    }
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut out: Vec<(Parameter, f64)> = Vec::with_capacity(codebook.len());
    let share = rho / codebook.len() as f64;
    for w in codebook {
        index.insert(w.key(), out.len());
        out.push((w.clone(), share));
    }
    for (w, p) in base {
        let scaled = (1.0 - rho) * p;
        match index.get(&w.key()) {
            Some(&i) => out[i].1 += scaled,
            None => {
                index.insert(w.key(), out.len());
                out.push((w, scaled));
            }
        }
    }
    out.retain(|(_, p)| *p > 0.0);
    out
}

/// Quantization step used by SGD and regularized ERM.
pub fn sgd_delta(m: usize) -> f64 {
    1.0 / (m as f64 * m as f64)
}

#[inline]
fn quantize_coordinate(x: f64, delta: f64) -> f64 {
    (x / delta - 0.5).ceil() * delta
}

fn quantize_vec(w: &[f64], delta: f64) -> Parameter {
    let rounded: Vec<f64> = w.iter().map(|&x| quantize_coordinate(x, delta) + 0.0).collect();
    Parameter(project_to_ball(rounded))
}

/// Round each coordinate to the nearest multiple of `δ` (ties toward the smaller
/// multiple) and project the result onto the unit ball.
pub fn quantize(w: &Parameter, delta: f64) -> Result<Parameter> {
    check_delta(delta)?;
    Ok(quantize_vec(w.as_slice(), delta))
}

/// `z̄`, which always lies in the ball.
pub fn mean_learner(s: &Sample) -> Result<Parameter> {
    LearnerSpec::Mean.compile(s.d(), s.m())?.run(s, &mut NoRng)
}

/// Grid `{(2j − n)/n : j = 0..=n}^d` with `n = ⌈√m⌉`, projected to the ball,
/// deduplicated and sorted lexicographically.
pub fn epsilon_net(d: usize, m: usize) -> Vec<Parameter> {
    let n = ceil_sqrt(m);
    let values: Vec<f64> = (0..=n).map(|j| (2 * j as i64 - n as i64) as f64 / n as f64).collect();
    let pts = product_grid(&values, d).into_iter().map(|v| Parameter(project_to_ball(v))).collect();
    sort_dedup(pts)
}

fn ceil_sqrt(m: usize) -> usize {
    let mut n = (m as f64).sqrt() as usize;
    while n * n < m {
        n += 1;
    }
    while n > 1 && (n - 1) * (n - 1) >= m {
        n -= 1;
    }
    n.max(1)
}

fn net_argmin(net: &[Parameter], zbar: &[f64]) -> Parameter {
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for (i, w) in net.iter().enumerate() {
        let score = dist_sq(w.as_slice(), zbar);
        if score < best_score {
            best_score = score;
            best = i;
        }
    }
    net[best].clone()
}

/// ERM over the ε-net for sample size `m`.
pub fn epsilon_net_erm(s: &Sample, m: usize) -> Result<Parameter> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be ≥ 1".into()));
    }
    Ok(net_argmin(&epsilon_net(s.d(), m), &s.mean()))
}

fn sgd_average(s: &Sample) -> Vec<f64> {
    let d = s.d();
    let mut w = vec![0.0; d];
    let mut sum = vec![0.0; d];
    for i in 0..s.m() {
        let z = s.point(i);
        let eta = 1.0 / (2.0 * (i + 1) as f64);
        for t in 0..d {
            w[t] -= eta * 2.0 * (w[t] - z[t]);
        }
        if norm_sq(&w) > 1.0 {
            w = project_to_ball(w);
        }
        for t in 0..d {
            sum[t] += w[t];
        }
    }
    sum.iter().map(|x| x / s.m() as f64).collect()
}

pub fn sgd_learner(s: &Sample) -> Result<Parameter> {
    LearnerSpec::Sgd.compile(s.d(), s.m())?.run(s, &mut NoRng)
}

pub fn regularized_erm(s: &Sample, lambda: f64) -> Result<Parameter> {
    LearnerSpec::RegularizedErm { lambda }.compile(s.d(), s.m())?.run(s, &mut NoRng)
}

pub fn subsample_learner<R: Rng + ?Sized>(s: &Sample, k: usize, base: &LearnerSpec, rng: &mut R) -> Result<Parameter> {
    LearnerSpec::Subsample { k, base: Box::new(base.clone()) }.compile(s.d(), s.m())?.run(s, rng)
}

pub fn randomized_response(base: LearnerSpec, rho: f64) -> Result<LearnerSpec> {
    check_rho(rho)?;
    Ok(LearnerSpec::RandomizedResponse { rho, base: Box::new(base) })
}

/// Helper for deterministic learners; panics if randomness is requested.
struct NoRng;

impl rand::RngCore for NoRng {
    fn next_u32(&mut self) -> u32 {
        unreachable!("deterministic learner drew randomness")
    }
    fn next_u64(&mut self) -> u64 {
        unreachable!("deterministic learner drew randomness")
    }
    fn fill_bytes(&mut self, _: &mut [u8]) {
        unreachable!("deterministic learner drew randomness")
    }
    fn try_fill_bytes(&mut self, _: &mut [u8]) -> std::result::Result<(), rand::Error> {
        unreachable!("deterministic learner drew randomness")
    }
}

/// The value `mean_coordinate` yields for sign sum `2c − m`.
pub fn count_coordinate(c: usize, m: usize, d: usize) -> f64 {
    mean_coordinate(2 * c as i64 - m as i64, m, d)
}
