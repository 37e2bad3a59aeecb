//! Information lower bounds for stochastic convex optimization, made executable.
//!
//! The crate is organised bottom-up:
//!
//! - [`infotheory`]: exact entropy, divergences, mutual information and couplings
//!   over finite alphabets.
//! - [`sco`]: the hard quadratic instance `D(p)` over the scaled hypercube, its
//!   risks and closed-form optima.
//! - [`learners`]: discrete-output learning algorithms and the exact law of their
//!   output given the sample.
//! - [`bounds`]: every inequality of the lower-bound argument as an evaluator or a
//!   verifier returning a [`bounds::BoundReport`].
//!
//! Monte Carlo loops and enumerations run through [`parallel`], which uses rayon
//! when the `parallel` feature is enabled and falls back to a sequential loop
//! otherwise. Results are bit-identical in both modes.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod error;
pub mod infotheory;
pub mod learners;
pub mod parallel;
pub mod quadrature;
pub mod sco;

pub use error::{Error, Result};

/// Structural tolerance for probability bookkeeping.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// Tolerance for identities between information quantities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
