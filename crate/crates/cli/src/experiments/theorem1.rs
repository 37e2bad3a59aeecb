//! `theorem1`: the end-to-end certificate at the instance dimension and `run.m`,
//! followed by the exact-MI dimension scan over `sweep.d` (default 1..6) at `p = 0`.
//! The learner defaults to the quantized mean with `δ = 1/16`.

use mi_sco_core::bounds::{mi_dimension_scan, theorem1_certificate, BoundReport, Theorem1Config};
use mi_sco_core::learners::LearnerSpec;
use mi_sco_core::Error;

use super::{f, or_default, Context};
use crate::output::{Curve, ExperimentOutput, Table};
use crate::HarnessError;

pub(super) fn run(ctx: &Context) -> Result<ExperimentOutput, HarnessError> {
    let cfg = ctx.cfg;
    let (d, m) = (cfg.instance.d, cfg.run.m);
    let spec = cfg.learner_spec(d)?.unwrap_or(LearnerSpec::QuantizedMean { delta: 1.0 / 16.0 });
    let mut tcfg = Theorem1Config::new(d, m, cfg.seed);
    tcfg.epsilon = cfg.run.epsilon;
    tcfg.p_draws = cfg.run.p_draws;
    tcfg.pilot_trials = cfg.run.pilot_trials;
    tcfg.trials = cfg.run.trials;
    tcfg.exec = ctx.exec;
    tcfg.budget = cfg.run.budget();

    let mut out = ExperimentOutput::default();
    match theorem1_certificate(&spec, &tcfg) {
        Ok(cert) => {
            let mut draws = Table::new(
                "theorem1_draws",
                &["draw", "excess_risk", "exact_mi", "good_count", "good_fraction", "best"],
            );
            for (k, dr) in cert.draws.iter().enumerate() {
                draws.push(vec![
                    k.to_string(),
                    f(dr.excess_risk),
                    f(dr.exact_mi),
                    dr.good.good.len().to_string(),
                    f(dr.good.fraction()),
                    (k == cert.best_draw).to_string(),
                ]);
            }
            let mut summary = Table::new(
                "theorem1_summary",
                &["learner", "d", "m", "epsilon", "measured_epsilon", "exact_mi", "lower_bound", "asymptotic_bound"],
            );
            summary.push(vec![
                spec.name(),
                d.to_string(),
                m.to_string(),
                f(cert.epsilon),
                f(cert.measured_epsilon),
                f(cert.exact_mi),
                f(cert.lower_bound),
                f(cert.asymptotic_bound),
            ]);
            out.tables.push(summary);
            out.tables.push(draws);
            out.reports.extend(cert.reports);
        }
        Err(Error::HypothesisUnmet(msg)) => {
            out.reports.push(BoundReport::flag("theorem1_hypothesis", false).with_dims(d, m).with_note(msg));
        }
        Err(e) => return Err(e.into()),
    }

    let dims = or_default(&cfg.sweep.d, &[1, 2, 3, 4, 5, 6]);
    let scan = mi_dimension_scan(&spec, &dims, m, ctx.exec)?;
    let mut table = Table::new("mi_dimension_scan", &["d", "mi_nats"]);
    let mut curve = Curve::new("mi_vs_d");
    for (&dd, &mi) in scan.dims.iter().zip(&scan.mi) {
        table.push(vec![dd.to_string(), f(mi)]);
        curve.points.push((dd as f64, mi));
    }
    out.reports.push(scan.report.with_note(format!("slope {} against d=1 value {}", f(scan.slope), f(scan.mi[0]))));
    out.tables.push(table);
    out.curves.push(curve);
    Ok(out)
}
