//! `xu-check`: exact generalization gap against `4√(2I/m)` over every enumerable
//! `(learner, d, m, p)` on the grid. Reads `sweep.d` (default 1..3), `sweep.m`
//! (default 1..4) and `sweep.p` (per-coordinate values, default −1/3, 0, 1/6, 1/3).

use mi_sco_core::bounds::{xu_bound, xu_check_channel, BoundReport};
use mi_sco_core::learners::{exact_channel_with_budget, randomized_response, LearnerSpec};
use mi_sco_core::sco::{HardInstance, LOSS_RANGE};
use mi_sco_core::Error;

use super::{f, join_p, or_default, product_grid, Context};
use crate::output::{Curve, ExperimentOutput, Table};
use crate::HarnessError;

/// Default learner menu at dimension `d`.
pub fn xu_menu(d: usize) -> Vec<LearnerSpec> {
    vec![
        LearnerSpec::Mean,
        LearnerSpec::QuantizedMean { delta: 0.25 },
        LearnerSpec::EpsilonNetErm,
        LearnerSpec::Sgd,
        LearnerSpec::RegularizedErm { lambda: 0.5 },
        LearnerSpec::Subsample { k: 1, base: Box::new(LearnerSpec::Mean) },
        randomized_response(LearnerSpec::QuantizedMean { delta: 0.5 }, 0.5).expect("ρ in range"),
        LearnerSpec::Constant(vec![0.1; d]),
    ]
}

pub(super) fn run(ctx: &Context) -> Result<ExperimentOutput, HarnessError> {
    let cfg = ctx.cfg;
    let mut out = ExperimentOutput::default();
    let mut table = Table::new("xu", &["learner", "d", "m", "p", "mi_nats", "gap", "xu_bound", "holds"]);
    let mut curve = Curve::new("xu_gap_vs_bound");
    let dims = or_default(&cfg.sweep.d, &[1, 2, 3]);
    let ms = or_default(&cfg.sweep.m, &[1, 2, 3, 4]);
    let pvals = or_default(&cfg.sweep.p, &[-1.0 / 3.0, 0.0, 1.0 / 6.0, 1.0 / 3.0]);
    let (mut checked, mut skipped) = (0usize, 0usize);
    for &d in &dims {
        let menu = match cfg.learner_spec(d)? {
            Some(spec) => vec![spec],
            None => xu_menu(d),
        };
        for &m in &ms {
            for p in product_grid(&pvals, d) {
                let inst = HardInstance::new(p.clone())?;
                for spec in &menu {
                    let learner = match spec.compile(d, m) {
                        Ok(l) => l,
                        Err(Error::InvalidParameter(_)) if matches!(spec, LearnerSpec::Subsample { k, .. } if *k > m) => continue,
                        Err(e) => return Err(e.into()),
                    };
                    let ch = match exact_channel_with_budget(&learner, &inst, cfg.run.budget(), ctx.exec) {
                        Ok(ch) => ch,
                        Err(Error::BudgetExceeded { .. }) => {
                            skipped += 1;
                            continue;
                        }
                        Err(e) => return Err(e.into()),
                    };
                    let r = xu_check_channel(&ch, &spec.name())?.with_seed(cfg.seed);
                    table.push(vec![
                        spec.name(),
                        d.to_string(),
                        m.to_string(),
                        join_p(&p),
                        f(ch.mutual_information()),
                        f(r.lhs),
                        f(r.rhs),
                        r.holds.to_string(),
                    ]);
                    curve.points.push((r.rhs, r.lhs));
                    out.reports.push(r);
                    checked += 1;
                }
            }
        }
    }
    out.reports.push(
        BoundReport::flag("xu_grid_nonempty", checked > 0).with_note(format!("{checked} configurations checked, {skipped} over budget")),
    );
    out.reports.extend(reference_case(ctx)?);
    out.tables.push(table);
    out.curves.push(curve);
    Ok(out)
}

/// Mean learner at `d = 1, m = 2, p = 0`: `I = (3/2) ln 2` and gap exactly 1.
fn reference_case(ctx: &Context) -> Result<Vec<BoundReport>, HarnessError> {
    let inst = HardInstance::unbiased(1)?;
    let ch = exact_channel_with_budget(&LearnerSpec::Mean.compile(1, 2)?, &inst, 1 << 10, ctx.exec)?;
    let mi = ch.mutual_information();
    let gap = ch.expected_gap();
    let bound = xu_bound(mi, 2, LOSS_RANGE)?;
    Ok(vec![
        BoundReport::at_most("xu_reference_mi", (mi - 1.5 * 2f64.ln()).abs(), 0.0, 1e-12).with_dims(1, 2),
        BoundReport::at_most("xu_reference_gap", (gap - 1.0).abs(), 0.0, 1e-12).with_dims(1, 2),
        BoundReport::at_most("xu_reference_bound", gap, bound, 1e-12).with_dims(1, 2),
    ])
}
