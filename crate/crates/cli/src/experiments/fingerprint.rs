//! `fingerprint`: the fingerprinting expectation by quadrature for `m ≤ 12` and by
//! Monte Carlo for the sizes in `sweep.m` (default 25 and 100).

use mi_sco_core::bounds::{fingerprint_expectation, BoundReport, Estimator, FingerprintMode, FINGERPRINT_TARGET, QUADRATURE_MAX_M};
use mi_sco_core::parallel::MonteCarlo;
use mi_sco_core::sco::MAX_BIAS;

use super::{f, or_default, Context};
use crate::output::{Curve, ExperimentOutput, Table};
use crate::HarnessError;

pub const ESTIMATORS: [Estimator; 5] = [
    Estimator::Zero,
    Estimator::Constant(MAX_BIAS),
    Estimator::Constant(-MAX_BIAS),
    Estimator::ClippedMean,
    Estimator::Sign,
];

pub(super) fn run(ctx: &Context) -> Result<ExperimentOutput, HarnessError> {
    let cfg = ctx.cfg;
    let mut out = ExperimentOutput::default();
    let mut table = Table::new("fingerprint", &["estimator", "m", "mode", "value", "ci_halfwidth"]);
    let mut curves: Vec<Curve> = ESTIMATORS.iter().map(|e| Curve::new(format!("fingerprint_{}", e.name()))).collect();
    let nodes = cfg.run.quadrature_nodes;

    for m in 1..=QUADRATURE_MAX_M {
        for (k, est) in ESTIMATORS.into_iter().enumerate() {
            let r = fingerprint_expectation(est, m, FingerprintMode::Quadrature { nodes })?;
            table.push(vec![est.name(), m.to_string(), "quadrature".into(), f(r.lhs), f(0.0)]);
            curves[k].points.push((m as f64, r.lhs));
            if est == Estimator::Zero {
                out.reports.push(
                    BoundReport::at_most("fingerprint_zero_is_tight", (r.lhs - FINGERPRINT_TARGET).abs(), 0.0, 1e-9)
                        .with_dims(1, m),
                );
            }
            out.reports.push(r);
        }
    }
    for (i, m) in or_default(&cfg.sweep.m, &[25, 100]).into_iter().enumerate() {
        for (k, est) in ESTIMATORS.into_iter().enumerate() {
            let stream = (i * ESTIMATORS.len() + k) as u64;
            let mc = MonteCarlo::new(cfg.run.trials, cfg.seed).with_stream(stream).with_exec(ctx.exec);
            let r = fingerprint_expectation(est, m, FingerprintMode::MonteCarlo(mc))?;
            table.push(vec![est.name(), m.to_string(), "monte_carlo".into(), f(r.lhs), f(r.ci_halfwidth)]);
            curves[k].points.push((m as f64, r.lhs));
            out.reports.push(r);
        }
    }
    out.tables.push(table);
    out.curves.extend(curves);
    Ok(out)
}
