//! `cmi`: exact conditional mutual information on enumerable supersamples, and the
//! subsampling rate sweep.
//!
//! The exact part reads `sweep.d` (default 1, 2) and `sweep.m` (default 1..4).
//! The rate sweep runs `subsample(k = round(√m), mean)` at the instance dimension
//! for each `m` in `sweep.rate_m` (default 4, 16, 64), estimating the CMI by Monte
//! Carlo over supersamples with `run.trials` draws.

use mi_sco_core::bounds::{cmi_exact, cmi_generalization_bound, cmi_monte_carlo, least_squares_slope, BoundReport, CmiEstimate};
use mi_sco_core::learners::{exact_channel_with_budget, randomized_response, LearnerSpec};
use mi_sco_core::parallel::{Execution, MonteCarlo};
use mi_sco_core::sco::{HardInstance, LOSS_RANGE};
use mi_sco_core::{Error, Result};

use super::{f, or_default, Context};
use crate::output::{Curve, ExperimentOutput, Table};
use crate::HarnessError;

const RATE_STREAM: u64 = 0x7261_7465;

/// Target exponent of the CMI bound under `k = √m` subsampling, and its tolerance.
pub const RATE_SLOPE: f64 = -0.25;
pub const RATE_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint {
    pub m: usize,
    pub k: usize,
    pub cmi: CmiEstimate,
    pub gap: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSweep {
    pub points: Vec<RatePoint>,
    pub bound_slope: f64,
    pub gap_slope: f64,
}

fn round_sqrt(m: usize) -> usize {
    ((m as f64).sqrt().round() as usize).clamp(1, m)
}

pub fn cmi_rate_sweep(inst: &HardInstance, ms: &[usize], trials: u64, seed: u64, exec: Execution) -> Result<RateSweep> {
    let d = inst.d();
    let mut points = Vec::with_capacity(ms.len());
    for (i, &m) in ms.iter().enumerate() {
        let k = round_sqrt(m);
        let learner = LearnerSpec::Subsample { k, base: Box::new(LearnerSpec::Mean) }.compile(d, m)?;
        let mc = MonteCarlo::new(trials, seed).with_stream(RATE_STREAM + i as u64).with_exec(exec);
        let cmi = cmi_monte_carlo(&learner, inst, &mc)?;
        let gap = exact_channel_with_budget(&learner, inst, 1 << 24, exec)?.expected_gap();
        let bound = cmi_generalization_bound(cmi.mean, m, LOSS_RANGE)?;
        points.push(RatePoint { m, k, cmi, gap, bound });
    }
    let lx: Vec<f64> = points.iter().map(|p| (p.m as f64).ln()).collect();
    let slope = |y: Vec<f64>| least_squares_slope(&lx, &y);
    let bound_slope = slope(points.iter().map(|p| p.bound.ln()).collect());
    let gap_slope = slope(points.iter().map(|p| p.gap.ln()).collect());
    Ok(RateSweep { points, bound_slope, gap_slope })
}

fn exact_menu(m: usize) -> Vec<LearnerSpec> {
    let mut menu = vec![
        LearnerSpec::Mean,
        LearnerSpec::EpsilonNetErm,
        LearnerSpec::QuantizedMean { delta: 0.25 },
        randomized_response(LearnerSpec::Mean, 0.5).expect("ρ in range"),
    ];
    if m >= 2 {
        menu.push(LearnerSpec::Subsample { k: 1, base: Box::new(LearnerSpec::Mean) });
    }
    menu
}

pub(super) fn run(ctx: &Context) -> std::result::Result<ExperimentOutput, HarnessError> {
    let cfg = ctx.cfg;
    let mut out = ExperimentOutput::default();
    let ln2 = 2f64.ln();
    let mut exact = Table::new("cmi_exact", &["learner", "d", "m", "cmi_nats", "cap_nats", "gap", "cmi_bound"]);
    for d in or_default(&cfg.sweep.d, &[1, 2]) {
        let inst = cfg.instance_at(d)?;
        for m in or_default(&cfg.sweep.m, &[1, 2, 3, 4]) {
            for spec in exact_menu(m) {
                let learner = spec.compile(d, m)?;
                let cmi = match cmi_exact(&learner, &inst, cfg.run.budget().min(1 << 22), ctx.exec) {
                    Ok(v) => v,
                    Err(Error::BudgetExceeded { .. }) => continue,
                    Err(e) => return Err(e.into()),
                };
                let cap = learner.prefix_len() as f64 * ln2;
                let gap = exact_channel_with_budget(&learner, &inst, cfg.run.budget(), ctx.exec)?.expected_gap();
                let bound = cmi_generalization_bound(cmi, m, LOSS_RANGE)?;
                let name = spec.name();
                out.reports.push(BoundReport::at_most(format!("cmi_cap[{name}]"), cmi, m as f64 * ln2, 1e-9).with_dims(d, m));
                if learner.prefix_len() < m {
                    out.reports.push(BoundReport::at_most(format!("cmi_prefix_cap[{name}]"), cmi, cap, 1e-9).with_dims(d, m));
                }
                out.reports.push(BoundReport::at_most(format!("cmi_bound[{name}]"), gap, bound, 1e-12).with_dims(d, m));
                exact.push(vec![name, d.to_string(), m.to_string(), f(cmi), f(cap), f(gap), f(bound)]);
            }
        }
    }
    out.tables.push(exact);

    let inst = cfg.instance()?;
    let rate_m = or_default(&cfg.sweep.rate_m, &[4, 16, 64]);
    let sweep = cmi_rate_sweep(&inst, &rate_m, cfg.run.trials, cfg.seed, ctx.exec)?;
    let mut rate = Table::new("cmi_rate", &["m", "k", "cmi_nats", "cmi_se", "selector_cap", "gap", "cmi_bound"]);
    let mut bound_curve = Curve::new("cmi_bound_vs_m");
    let mut gap_curve = Curve::new("subsample_gap_vs_m");
    for p in &sweep.points {
        rate.push(vec![
            p.m.to_string(),
            p.k.to_string(),
            f(p.cmi.mean),
            f(p.cmi.std_error),
            f(p.k as f64 * ln2),
            f(p.gap),
            f(p.bound),
        ]);
        bound_curve.points.push((p.m as f64, p.bound));
        gap_curve.points.push((p.m as f64, p.gap));
        let half = 3.0 * p.cmi.std_error;
        out.reports.push(
            BoundReport::at_most("cmi_bound_covers_gap", p.gap, p.bound, 0.0)
                .with_dims(inst.d(), p.m)
                .with_trials(p.cmi.trials, half)
                .with_seed(cfg.seed),
        );
    }
    out.reports.push(
        BoundReport::at_most("cmi_bound_rate_slope", (sweep.bound_slope - RATE_SLOPE).abs(), RATE_TOLERANCE, 0.0)
            .with_dims(inst.d(), *rate_m.last().unwrap_or(&0))
            .with_seed(cfg.seed)
            .with_note(format!("bound slope {}, measured gap slope {}", f(sweep.bound_slope), f(sweep.gap_slope))),
    );
    out.tables.push(rate);
    out.curves.push(bound_curve);
    out.curves.push(gap_curve);
    Ok(out)
}
