//! `tradeoff`: randomized response over a quantized mean, swept over
//! `(d, m, δ, ρ)`. Reads `sweep.d` and `sweep.m` (default the instance `d` and
//! `run.m`), `sweep.delta` (default 1/2..1/16) and `sweep.rho` (default 0..1).

use mi_sco_core::bounds::{asymptotic_lower_bound, xu_bound, BoundReport};
use mi_sco_core::learners::{exact_channel_with_budget, randomized_response, LearnerSpec};
use mi_sco_core::sco::LOSS_RANGE;

use super::{f, or_default, Context};
use crate::output::{Curve, ExperimentOutput, Table};
use crate::HarnessError;

pub const HEADER: [&str; 8] = ["d", "m", "delta", "rho", "mi_nats", "excess_risk", "xu_bound", "pipeline_lb"];

pub(super) fn run(ctx: &Context) -> Result<ExperimentOutput, HarnessError> {
    let cfg = ctx.cfg;
    let mut out = ExperimentOutput::default();
    let mut table = Table::new("tradeoff", &HEADER);
    let dims = or_default(&cfg.sweep.d, &[cfg.instance.d]);
    let ms = or_default(&cfg.sweep.m, &[cfg.run.m]);
    let mut deltas = or_default(&cfg.sweep.delta, &[0.5, 0.25, 0.125, 0.0625]);
    deltas.sort_by(|a, b| b.total_cmp(a));
    let mut rhos = or_default(&cfg.sweep.rho, &[0.0, 0.25, 0.5, 0.75, 1.0]);
    rhos.sort_by(f64::total_cmp);

    for &d in &dims {
        let inst = cfg.instance_at(d)?;
        for &m in &ms {
            // mi[i][j] at deltas[i], rhos[j]
            let mut mi = vec![vec![0.0; rhos.len()]; deltas.len()];
            for (i, &delta) in deltas.iter().enumerate() {
                for (j, &rho) in rhos.iter().enumerate() {
                    let spec = randomized_response(LearnerSpec::QuantizedMean { delta }, rho)?;
                    let ch = exact_channel_with_budget(&spec.compile(d, m)?, &inst, cfg.run.budget(), ctx.exec)?;
                    let info = ch.mutual_information();
                    let risk = ch.expected_suboptimality();
                    let bound = xu_bound(info, m, LOSS_RANGE)?;
                    let lb = if risk > 0.0 { asymptotic_lower_bound(d, m, risk) } else { 0.0 };
                    table.push(vec![d.to_string(), m.to_string(), f(delta), f(rho), f(info), f(risk), f(bound), f(lb)]);
                    out.reports.push(
                        BoundReport::at_most(format!("xu[{}]", spec.name()), ch.expected_gap(), bound, 1e-12)
                            .with_dims(d, m)
                            .with_seed(cfg.seed),
                    );
                    mi[i][j] = info;
                }
            }
            for (j, &rho) in rhos.iter().enumerate() {
                let steps = (1..deltas.len()).map(|i| mi[i][j] - mi[i - 1][j]).fold(f64::INFINITY, f64::min);
                out.reports.push(
                    BoundReport::at_least(format!("mi_nondecreasing_as_delta_shrinks[rho={rho}]"), steps.min(0.0), 0.0, 1e-12)
                        .with_dims(d, m),
                );
                let mut c = Curve::new(format!("mi_vs_delta_d{d}_m{m}_rho{rho}"));
                c.points = deltas.iter().enumerate().map(|(i, &x)| (x, mi[i][j])).collect();
                out.curves.push(c);
            }
            for (i, &delta) in deltas.iter().enumerate() {
                let steps = (1..rhos.len()).map(|j| mi[i][j - 1] - mi[i][j]).fold(f64::INFINITY, f64::min);
                out.reports.push(
                    BoundReport::at_least(format!("mi_nonincreasing_in_rho[delta={delta}]"), steps.min(0.0), 0.0, 1e-12)
                        .with_dims(d, m),
                );
                let mut c = Curve::new(format!("mi_vs_rho_d{d}_m{m}_delta{delta}"));
                c.points = rhos.iter().enumerate().map(|(j, &x)| (x, mi[i][j])).collect();
                out.curves.push(c);
            }
        }
    }
    out.tables.push(table);
    Ok(out)
}
