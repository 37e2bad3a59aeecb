//! `net-erm`: output entropy of ε-net ERM against `d ln(√m + 1)` on enumerable
//! instances, and the empirical-risk slack on random samples. Reads `sweep.d`
//! (default 1..3) and `sweep.m` (default 1, 4, 9, 16).

use mi_sco_core::bounds::BoundReport;
use mi_sco_core::learners::{epsilon_net, epsilon_net_erm, exact_channel_with_budget, LearnerSpec};
use mi_sco_core::parallel::{map_indexed, trial_rng, Execution};
use mi_sco_core::sco::HardInstance;
use mi_sco_core::{Error, Result};

use super::{f, or_default, Context};
use crate::output::{Curve, ExperimentOutput, Table};
use crate::HarnessError;

const SLACK_STREAM: u64 = 0x6e65_7473;

/// `L_S(w_net) − min_w L_S(w)` on `cases` random samples; returns (min, max).
pub fn net_erm_slack_suite(inst: &HardInstance, m: usize, cases: usize, seed: u64, exec: Execution) -> Result<(f64, f64)> {
    let slacks = map_indexed(cases, exec, |i| -> Result<f64> {
        let s = inst.sample(m, &mut trial_rng(seed, SLACK_STREAM + m as u64, i as u64))?;
        let w = epsilon_net_erm(&s, m)?;
        Ok(s.empirical_risk(w.as_slice())? - s.empirical_risk(&s.mean())?)
    });
    let slacks = slacks.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(slacks.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x))))
}

pub(super) fn run(ctx: &Context) -> std::result::Result<ExperimentOutput, HarnessError> {
    let cfg = ctx.cfg;
    let mut out = ExperimentOutput::default();
    let mut table = Table::new(
        "net_erm",
        &["d", "m", "net_size", "entropy_nats", "cap_nats", "mi_nats", "min_slack", "max_slack", "slack_cap"],
    );
    for d in or_default(&cfg.sweep.d, &[1, 2, 3]) {
        let inst = cfg.instance_at(d)?;
        let mut entropy_curve = Curve::new(format!("net_entropy_d{d}"));
        let mut cap_curve = Curve::new(format!("net_entropy_cap_d{d}"));
        for m in or_default(&cfg.sweep.m, &[1, 4, 9, 16]) {
            let cap = d as f64 * ((m as f64).sqrt() + 1.0).ln();
            let learner = LearnerSpec::EpsilonNetErm.compile(d, m)?;
            let (entropy, mi) = match exact_channel_with_budget(&learner, &inst, cfg.run.budget(), ctx.exec) {
                Ok(ch) => (Some(ch.output_entropy()), Some(ch.mutual_information())),
                Err(Error::BudgetExceeded { .. }) => (None, None),
                Err(e) => return Err(e.into()),
            };
            if let Some(h) = entropy {
                out.reports.push(BoundReport::at_most("net_erm_entropy_cap", h, cap, 1e-12).with_dims(d, m));
                entropy_curve.points.push((m as f64, h));
                cap_curve.points.push((m as f64, cap));
            }
            let (lo, hi) = net_erm_slack_suite(&inst, m, cfg.run.cases, cfg.seed, ctx.exec)?;
            let slack_cap = (d as f64 / m as f64).sqrt();
            let trials = cfg.run.cases as u64;
            out.reports.push(
                BoundReport::at_least("net_erm_slack_nonnegative", lo, 0.0, 1e-12).with_dims(d, m).with_trials(trials, 0.0).with_seed(cfg.seed),
            );
            out.reports.push(
                BoundReport::at_most("net_erm_slack_cap", hi, slack_cap, 1e-9).with_dims(d, m).with_trials(trials, 0.0).with_seed(cfg.seed),
            );
            let opt = |x: Option<f64>| x.map(f).unwrap_or_default();
            table.push(vec![
                d.to_string(),
                m.to_string(),
                epsilon_net(d, m).len().to_string(),
                opt(entropy),
                f(cap),
                opt(mi),
                f(lo),
                f(hi),
                f(slack_cap),
            ]);
        }
        out.curves.push(entropy_curve);
        out.curves.push(cap_curve);
    }
    out.tables.push(table);
    Ok(out)
}
