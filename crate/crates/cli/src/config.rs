//! Experiment configuration: a TOML file with strict schema.
//!
//! ```toml
//! experiment = "xu-check"      # optional, must match the CLI argument
//! seed = 7                     # master seed
//! output_dir = "out/xu"
//!
//! [instance]
//! d = 2
//! p_mode = "fixed"             # or "uniform"
//! p = [0.1, -0.2]              # fixed mode; a single value is broadcast
//! p_seed = 3                   # uniform mode; defaults to the master seed
//!
//! [learner]
//! kind = "randomized_response"
//! rho = 0.25
//! [learner.base]
//! kind = "quantized_mean"
//! delta = 0.125
//!
//! [run]
//! m = 4
//! trials = 100000
//!
//! [sweep]
//! delta = [0.5, 0.25]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use mi_sco_core::bounds::EPSILON_LIMIT;
use mi_sco_core::learners::LearnerSpec;
use mi_sco_core::parallel::trial_rng;
use mi_sco_core::sco::{HardInstance, MAX_BIAS};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config schema violation: {0}")]
    Schema(String),
    #[error("config value out of range: {0}")]
    Range(String),
}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub instance: InstanceConfig,
    pub learner: Option<LearnerConfig>,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PMode {
    Fixed,
    #[default]
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default)]
    pub p_mode: PMode,
    pub p: Option<Vec<f64>>,
    pub p_seed: Option<u64>,
}

fn default_d() -> usize {
    2
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig { d: default_d(), p_mode: PMode::Uniform, p: None, p_seed: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Mean,
    QuantizedMean,
    EpsilonNetErm,
    Sgd,
    RegularizedErm,
    Subsample,
    RandomizedResponse,
    Constant,
    CoordinateSign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub k: Option<usize>,
    pub rho: Option<f64>,
    pub coordinate: Option<usize>,
    pub value: Option<Vec<f64>>,
    pub base: Option<Box<LearnerConfig>>,
}

impl LearnerConfig {
    pub fn of_kind(kind: LearnerKind) -> Self {
        LearnerConfig { kind, delta: None, lambda: None, k: None, rho: None, coordinate: None, value: None, base: None }
    }

    /// Build the learner for dimension `d`, rejecting parameters the kind does not take.
    pub fn to_spec(&self, d: usize) -> ConfigResult<LearnerSpec> {
        let allowed: &[&str] = match self.kind {
            LearnerKind::Mean | LearnerKind::EpsilonNetErm | LearnerKind::Sgd => &[],
            LearnerKind::QuantizedMean => &["delta"],
            LearnerKind::RegularizedErm => &["lambda"],
            LearnerKind::Subsample => &["k", "base"],
            LearnerKind::RandomizedResponse => &["rho", "base"],
            LearnerKind::Constant => &["value"],
            LearnerKind::CoordinateSign => &["coordinate"],
        };
        let given = [
            ("delta", self.delta.is_some()),
            ("lambda", self.lambda.is_some()),
            ("k", self.k.is_some()),
            ("rho", self.rho.is_some()),
            ("coordinate", self.coordinate.is_some()),
            ("value", self.value.is_some()),
            ("base", self.base.is_some()),
        ];
        for (key, present) in given {
            if present && !allowed.contains(&key) {
                return Err(ConfigError::Schema(format!("learner kind {:?} does not take `{key}`", self.kind)));
            }
        }
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| ConfigError::Schema(format!("learner needs `{key}`")));
        let base = || -> ConfigResult<Box<LearnerSpec>> {
            match &self.base {
                Some(b) => Ok(Box::new(b.to_spec(d)?)),
                None => Ok(Box::new(LearnerSpec::Mean)),
            }
        };
        let spec = match self.kind {
            LearnerKind::Mean => LearnerSpec::Mean,
            LearnerKind::EpsilonNetErm => LearnerSpec::EpsilonNetErm,
            LearnerKind::Sgd => LearnerSpec::Sgd,
            LearnerKind::QuantizedMean => {
                let delta = need(self.delta, "delta")?;
                if !(delta > 0.0) {
                    return Err(ConfigError::Range(format!("delta = {delta} must be > 0")));
                }
                LearnerSpec::QuantizedMean { delta }
            }
            LearnerKind::RegularizedErm => {
                let lambda = need(self.lambda, "lambda")?;
                if !(lambda >= 0.0) {
                    return Err(ConfigError::Range(format!("lambda = {lambda} must be ≥ 0")));
                }
                LearnerSpec::RegularizedErm { lambda }
            }
            LearnerKind::Subsample => {
                let k = self.k.ok_or_else(|| ConfigError::Schema("learner needs `k`".into()))?;
                LearnerSpec::Subsample { k, base: base()? }
            }
            LearnerKind::RandomizedResponse => {
                let rho = need(self.rho, "rho")?;
                if !(0.0..=1.0).contains(&rho) {
                    return Err(ConfigError::Range(format!("rho = {rho} outside [0, 1]")));
                }
                LearnerSpec::RandomizedResponse { rho, base: base()? }
            }
            LearnerKind::Constant => LearnerSpec::Constant(self.value.clone().unwrap_or_else(|| vec![0.0; d])),
            LearnerKind::CoordinateSign => LearnerSpec::CoordinateSign { coordinate: self.coordinate.unwrap_or(0) },
        };
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_m")]
    pub m: usize,
    pub epsilon: Option<f64>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_pilot")]
    pub pilot_trials: u64,
    #[serde(default = "default_nodes")]
    pub quadrature_nodes: usize,
    /// Random cases per property suite.
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default = "default_subgaussian_cases")]
    pub subgaussian_cases: usize,
    #[serde(default = "default_p_draws")]
    pub p_draws: usize,
    /// Enumeration budget as a power of two.
    #[serde(default = "default_budget_log2")]
    pub budget_log2: u32,
}

fn default_m() -> usize {
    4
}
fn default_trials() -> u64 {
    100_000
}
fn default_pilot() -> u64 {
    10_000
}
fn default_nodes() -> usize {
    64
}
fn default_cases() -> usize {
    1000
}
fn default_subgaussian_cases() -> usize {
    200
}
fn default_p_draws() -> usize {
    8
}
fn default_budget_log2() -> u32 {
    24
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: default_m(),
            epsilon: None,
            trials: default_trials(),
            pilot_trials: default_pilot(),
            quadrature_nodes: default_nodes(),
            cases: default_cases(),
            subgaussian_cases: default_subgaussian_cases(),
            p_draws: default_p_draws(),
            budget_log2: default_budget_log2(),
        }
    }
}

impl RunConfig {
    pub fn budget(&self) -> u128 {
        1u128 << self.budget_log2
    }
}

/// Sweep axes; each experiment documents which ones it reads. Empty means the
/// experiment's own default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub d: Vec<usize>,
    #[serde(default)]
    pub m: Vec<usize>,
    #[serde(default)]
    pub delta: Vec<f64>,
    #[serde(default)]
    pub rho: Vec<f64>,
    /// Per-coordinate bias values; grids are formed as products over coordinates.
    #[serde(default)]
    pub p: Vec<f64>,
    /// Sample sizes for the subsampling-rate sweep.
    #[serde(default)]
    pub rate_m: Vec<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> ConfigResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> ConfigResult<()> {
        let range = |ok: bool, msg: String| if ok { Ok(()) } else { Err(ConfigError::Range(msg)) };
        range(self.instance.d >= 1, "instance.d must be ≥ 1".into())?;
        range(self.run.m >= 1, "run.m must be ≥ 1".into())?;
        if let Some(e) = self.run.epsilon {
            range(e > 0.0 && e < EPSILON_LIMIT, format!("run.epsilon = {e} must lie in (0, 1/54)"))?;
        }
        range(self.run.trials >= 1, "run.trials must be ≥ 1".into())?;
        range(self.run.pilot_trials >= 1, "run.pilot_trials must be ≥ 1".into())?;
        range(self.run.quadrature_nodes >= 1, "run.quadrature_nodes must be ≥ 1".into())?;
        range(self.run.cases >= 1 && self.run.subgaussian_cases >= 1, "suite case counts must be ≥ 1".into())?;
        range(self.run.p_draws >= 1, "run.p_draws must be ≥ 1".into())?;
        range(self.run.budget_log2 <= 40, "run.budget_log2 must be ≤ 40".into())?;
        range(self.sweep.d.iter().all(|&d| d >= 1), "sweep.d entries must be ≥ 1".into())?;
        range(self.sweep.m.iter().chain(&self.sweep.rate_m).all(|&m| m >= 1), "sweep m entries must be ≥ 1".into())?;
        range(self.sweep.delta.iter().all(|&x| x > 0.0), "sweep.delta entries must be > 0".into())?;
        range(self.sweep.rho.iter().all(|x| (0.0..=1.0).contains(x)), "sweep.rho entries must lie in [0, 1]".into())?;
        range(self.sweep.p.iter().all(|x| x.abs() <= MAX_BIAS), "sweep.p entries must lie in [-1/3, 1/3]".into())?;
        match (self.instance.p_mode, &self.instance.p) {
            (PMode::Fixed, None) => return Err(ConfigError::Schema("p_mode = \"fixed\" needs instance.p".into())),
            (PMode::Uniform, Some(_)) => return Err(ConfigError::Schema("instance.p is only allowed with p_mode = \"fixed\"".into())),
            (PMode::Fixed, Some(p)) => {
                range(p.len() == 1 || p.len() == self.instance.d, format!("instance.p has {} entries, d = {}", p.len(), self.instance.d))?;
                range(p.iter().all(|x| x.abs() <= MAX_BIAS), "instance.p entries must lie in [-1/3, 1/3]".into())?;
            }
            _ => {}
        }
        if let Some(l) = &self.learner {
            l.to_spec(self.instance.d)?;
        }
        Ok(())
    }

    /// The instance at dimension `d`: fixed `p` (broadcast when a single value is
    /// given) or a draw from the uniform prior seeded by `(p_seed, d)`.
    pub fn instance_at(&self, d: usize) -> ConfigResult<HardInstance> {
        let p = match (&self.instance.p_mode, &self.instance.p) {
            (PMode::Fixed, Some(p)) if p.len() == 1 => vec![p[0]; d],
            (PMode::Fixed, Some(p)) if p.len() == d => p.clone(),
            (PMode::Fixed, Some(p)) => {
                return Err(ConfigError::Range(format!("instance.p has {} entries but the experiment needs d = {d}", p.len())))
            }
            _ => {
                let seed = self.instance.p_seed.unwrap_or(self.seed);
                return HardInstance::uniform_prior(d, &mut trial_rng(seed, PRIOR_STREAM, d as u64))
                    .map_err(|e| ConfigError::Range(e.to_string()));
            }
        };
        HardInstance::new(p).map_err(|e| ConfigError::Range(e.to_string()))
    }

    pub fn instance(&self) -> ConfigResult<HardInstance> {
        self.instance_at(self.instance.d)
    }

    pub fn learner_spec(&self, d: usize) -> ConfigResult<Option<LearnerSpec>> {
        self.learner.as_ref().map(|l| l.to_spec(d)).transpose()
    }
}

const PRIOR_STREAM: u64 = 0x696e_7374;
