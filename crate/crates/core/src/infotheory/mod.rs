//! Exact information theory over finite alphabets.
//!
//! Every quantity is in nats. `0 · ln 0` is taken as `0`, and a KL divergence whose
//! support condition fails is reported as `f64::INFINITY` rather than an error.

mod coupling;
mod measures;
mod pmf;

pub use coupling::{corner_coupling, disagreement_probability, optimal_coupling};
pub use measures::{
    conditional_mutual_information, conditional_mutual_information_by_slices, entropy,
    kl_divergence, mutual_information, mutual_information_kl_form, nats_to_bits, pinsker_slack,
    total_variation, xlogy,
};
pub use pmf::{FinitePmf, JointPmf, TriplePmf};
