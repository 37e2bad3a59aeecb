//! Deterministic data-parallel loops.
//!
//! Work is cut into fixed-size chunks. Each chunk is reduced sequentially and the
//! chunk results are combined in index order by pairwise summation, so every
//! reduction is independent of the number of worker threads. With the `parallel`
//! feature the chunks are spread over rayon's pool; without it (or with
//! [`Execution::Sequential`]) they run in a plain loop and give the same bits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Trials per chunk. Fixed so that summation order never depends on the pool.
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether rayon will actually be used for this mode in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Monte Carlo budget: number of trials, master seed, stream and execution mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub trials: u64,
    pub seed: u64,
    pub stream: u64,
    pub exec: Execution,
}

impl MonteCarlo {
    pub fn new(trials: u64, seed: u64) -> Self {
        MonteCarlo { trials, seed, stream: 0, exec: Execution::default() }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `(master, stream, index)`. Streams separate pilot runs, prior draws
/// and main trials that share a master seed.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index)
}

pub fn trial_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, index))
}

/// Running first and second moments of one observable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(self, other: Moments) -> Moments {
        Moments { n: self.n + other.n, sum: self.sum + other.sum, sum_sq: self.sum_sq + other.sum_sq }
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        self.sum / self.n as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn merge_moments_pairwise(parts: &[Vec<Moments>], width: usize) -> Vec<Moments> {
    (0..width)
        .map(|j| {
            let sums: Vec<f64> = parts.iter().map(|p| p[j].sum).collect();
            let sqs: Vec<f64> = parts.iter().map(|p| p[j].sum_sq).collect();
            Moments {
                n: parts.iter().map(|p| p[j].n).sum(),
                sum: pairwise_sum(&sums),
                sum_sq: pairwise_sum(&sqs),
            }
        })
        .collect()
}

/// Map every chunk index through `f` and return the results in index order.
pub fn map_chunks<T, F>(n_chunks: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if exec.is_parallel() {
            use rayon::prelude::*;
            return (0..n_chunks).into_par_iter().map(&f).collect();
        }
    }
    let _ = exec;
    (0..n_chunks).map(f).collect()
}

/// Map `0..n` through `f`, preserving order.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let n_chunks = n.div_ceil(CHUNK);
    let parts = map_chunks(n_chunks, exec, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        (lo..hi).map(&f).collect::<Vec<T>>()
    });
    parts.into_iter().flatten().collect()
}

/// Deterministic sum of `f(i)` over `0..n`.
pub fn sum_indexed<F>(n: usize, exec: Execution, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let n_chunks = n.div_ceil(CHUNK);
    let parts = map_chunks(n_chunks, exec, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        let vals: Vec<f64> = (lo..hi).map(&f).collect();
        pairwise_sum(&vals)
    });
    pairwise_sum(&parts)
}

/// Run `mc.trials` independent trials. Trial `i` receives its own RNG derived from
/// `(mc.seed, mc.stream, i)` and writes `width` observations into the buffer.
pub fn monte_carlo<F>(mc: &MonteCarlo, width: usize, f: F) -> Vec<Moments>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync + Send,
{
    let trials = mc.trials as usize;
    let n_chunks = trials.div_ceil(CHUNK);
    let parts = map_chunks(n_chunks, mc.exec, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(trials);
        let mut acc = vec![Moments::default(); width];
        let mut buf = vec![0.0; width];
        for i in lo..hi {
            let mut rng = trial_rng(mc.seed, mc.stream, i as u64);
            f(&mut rng, &mut buf);
            for (a, &x) in acc.iter_mut().zip(&buf) {
                a.push(x);
            }
        }
        acc
    });
    if parts.is_empty() {
        return vec![Moments::default(); width];
    }
    merge_moments_pairwise(&parts, width)
}
