//! Executable bounds and verifiers.

mod attack;
mod cmi;
mod fingerprint;
mod generalization;
mod lemmas;
mod report;
mod theorem1;

pub use attack::{
    attack_statistics, estimate_normalizers, good_coordinates, AttackStats, CoordinateEstimate, GoodSet, GOOD_THRESHOLD,
};
pub use cmi::{cmi_exact, cmi_monte_carlo, CmiEstimate};
pub use fingerprint::{
    fingerprint_expectation, fingerprint_factor, fingerprint_monte_carlo, fingerprint_statistic, Estimator,
    FingerprintMode, FINGERPRINT_TARGET, QUADRATURE_MAX_M,
};
pub use generalization::{
    chain_rule_decomposition, mean_learner_risk_check, subgaussian_tail_check, xu_check, xu_check_channel,
};
pub use lemmas::{
    cmi_generalization_bound, concentration_constant_check, corbounded_mi_lower_bound, gm, gm_domain_limit,
    good_fraction_floor, paley_zygmund_check, paley_zygmund_from_samples, pz_good_fraction, rademacher_joint,
    random_bounded_joint, random_rademacher_joint, subgaussian_mi_lower_bound, verify_bounded_lemma,
    verify_subgaussian_lemma, xu_bound, RealJoint,
};
pub use report::{fmt_float, reports_to_csv, BoundReport, Direction};
pub use theorem1::{
    asymptotic_lower_bound, least_squares_slope, mi_dimension_scan, pipeline_argument, theorem1_certificate,
    DimensionScan, DrawSummary, Theorem1Certificate, Theorem1Config, EPSILON_LIMIT,
};
