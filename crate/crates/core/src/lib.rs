//! Residual and past extropy of lifetime distributions.
//!
//! The crate evaluates `J(X;t) = -1/2 ∫_t^∞ (f/S(t))²` and its past
//! counterpart for a small set of lifetime models and for laws built from
//! them (order statistics, coherent systems, k-records), checks the
//! signature-based conditions under which monotone extropy is preserved,
//! and estimates both functionals from data with a Gaussian kernel.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod functionals;
pub mod kde;
pub mod order;
pub mod quadrature;
pub mod realdata;
pub mod records;
pub mod study;

pub use distributions::{Distribution, Family};
pub use error::{Curve, Error, Result};
pub use functionals::{
    classify_monotonicity, extropy, extropy_curve, hazard_from_rex, hazard_roots, past_extropy,
    residual_extropy, CurveKind, ExtropyCurve, Monotonicity,
};
pub use kde::{IntegrationLimits, KdeModel, Sample};
pub use order::{
    order_statistic_distribution, preservation_premises, psi, psi_tilde, system_distribution,
    PreservationMode, Signature,
};
pub use records::k_record_distribution;
pub use study::{run_study, StudyConfig, StudyRow};
