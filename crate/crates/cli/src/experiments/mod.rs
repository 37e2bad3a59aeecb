//! The experiment registry.

mod cmi;
mod fingerprint;
mod lemmas;
mod net_erm;
mod theorem1;
mod tradeoff;
mod xu;

use std::fmt;
use std::str::FromStr;

use mi_sco_core::bounds::fmt_float;
use mi_sco_core::parallel::Execution;

use crate::config::ExperimentConfig;
use crate::output::ExperimentOutput;
use crate::HarnessError;

pub use cmi::cmi_rate_sweep;
pub use net_erm::net_erm_slack_suite;
pub use xu::xu_menu;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    VerifyLemmas,
    Fingerprint,
    XuCheck,
    Tradeoff,
    NetErm,
    Cmi,
    Theorem1,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::VerifyLemmas,
        Experiment::Fingerprint,
        Experiment::XuCheck,
        Experiment::Tradeoff,
        Experiment::NetErm,
        Experiment::Cmi,
        Experiment::Theorem1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::VerifyLemmas => "verify-lemmas",
            Experiment::Fingerprint => "fingerprint",
            Experiment::XuCheck => "xu-check",
            Experiment::Tradeoff => "tradeoff",
            Experiment::NetErm => "net-erm",
            Experiment::Cmi => "cmi",
            Experiment::Theorem1 => "theorem1",
        }
    }

    pub fn run(self, cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentOutput, HarnessError> {
        let ctx = Context { cfg, exec };
        match self {
            Experiment::VerifyLemmas => lemmas::run(&ctx),
            Experiment::Fingerprint => fingerprint::run(&ctx),
            Experiment::XuCheck => xu::run(&ctx),
            Experiment::Tradeoff => tradeoff::run(&ctx),
            Experiment::NetErm => net_erm::run(&ctx),
            Experiment::Cmi => cmi::run(&ctx),
            Experiment::Theorem1 => theorem1::run(&ctx),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HarnessError::UnknownExperiment(s.to_string()))
    }
}

pub(crate) struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub exec: Execution,
}

pub(crate) fn f(x: f64) -> String {
    fmt_float(x)
}

pub(crate) fn join_p(p: &[f64]) -> String {
    p.iter().map(|&x| fmt_float(x)).collect::<Vec<_>>().join(";")
}

/// All vectors of length `d` with entries from `values`, in lexicographic order.
pub(crate) fn product_grid(values: &[f64], d: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(d)];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

/// `x` when non-empty, else `default`.
pub(crate) fn or_default<T: Clone>(x: &[T], default: &[T]) -> Vec<T> {
    if x.is_empty() { default.to_vec() } else { x.to_vec() }
}
