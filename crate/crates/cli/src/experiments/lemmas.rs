//! `verify-lemmas`: the property suites, closed-form lemma values, the sub-Gaussian
//! tail certificate and the mean learner's risk identity.

use mi_sco_core::bounds::{
    corbounded_mi_lower_bound, gm, mean_learner_risk_check, subgaussian_mi_lower_bound, subgaussian_tail_check,
    BoundReport,
};
use mi_sco_core::parallel::MonteCarlo;
use mi_sco_core::sco::MAX_BIAS;

use super::{f, Context};
use crate::output::{Curve, ExperimentOutput, Table};
use crate::suites;
use crate::HarnessError;

const TAIL_STREAM: u64 = 11;
const RISK_STREAM: u64 = 12;

/// `|lhs − expected| ≤ 1e-12`.
fn closed_form(name: &str, value: f64, expected: f64) -> BoundReport {
    BoundReport::at_most(name, (value - expected).abs(), 0.0, 1e-12)
        .with_note(format!("value {} expected {}", f(value), f(expected)))
}

pub(super) fn run(ctx: &Context) -> Result<ExperimentOutput, HarnessError> {
    let cfg = ctx.cfg;
    let (seed, exec, m) = (cfg.seed, ctx.exec, cfg.run.m);
    let mut out = ExperimentOutput::default();
    let r = &mut out.reports;

    r.push(suites::pinsker_suite(cfg.run.cases, seed, exec)?.with_seed(seed));
    r.extend(suites::coupling_suite(cfg.run.cases, seed, exec)?.into_iter().map(|x| x.with_seed(seed)));
    r.push(suites::bounded_lemma_suite(cfg.run.cases, seed, exec).with_seed(seed));
    r.push(suites::subgaussian_lemma_suite(cfg.run.subgaussian_cases, seed, exec).with_seed(seed));

    r.push(closed_form("bounded_lemma_beta_1", corbounded_mi_lower_bound(1.0), 0.125));
    r.push(closed_form("bounded_lemma_beta_half", corbounded_mi_lower_bound(0.5), 1.0 / 128.0));
    let ln = 20.0 * 2f64.ln();
    let oracle = (1.0 / (192.0 * 2f64.sqrt() * ln)).powi(2);
    r.push(closed_form("subgaussian_lemma_beta_1_c_1", subgaussian_mi_lower_bound(1.0, 1.0), oracle));
    r.push(closed_form("gm_equals_lemma_at_proxy", gm(1.0, m), subgaussian_mi_lower_bound(1.0, 2.0 * (m as f64).sqrt())));
    r.extend(suites::gm_shape_checks(m));
    r.extend(suites::paley_zygmund_examples()?);

    let taus: Vec<f64> = (1..=8).map(|i| 0.5 * i as f64 * (m as f64).sqrt()).collect();
    for (k, p) in [0.0, MAX_BIAS].into_iter().enumerate() {
        let mc = MonteCarlo::new(cfg.run.trials, seed).with_stream(TAIL_STREAM + 100 * k as u64).with_exec(exec);
        r.extend(subgaussian_tail_check(p, m, &taus, &mc));
    }

    let inst = cfg.instance()?;
    let mc = MonteCarlo::new(cfg.run.trials, seed).with_stream(RISK_STREAM).with_exec(exec);
    r.extend(mean_learner_risk_check(&inst, m, &mc)?);

    let mut curve = Curve::new(format!("gm_m{m}"));
    let mut table = Table::new("gm", &["m", "a", "gm"]);
    for a in suites::gm_grid(m, 200) {
        let g = gm(a, m);
        curve.points.push((a, g));
        table.push(vec![m.to_string(), f(a), f(g)]);
    }
    out.curves.push(curve);
    out.tables.push(table);
    Ok(out)
}
