//! Error type for constructor and validation failures.

use thiserror::Error;

/// Failures raised by validated constructors and by [`crate::functionals::MetricFunctional::validate`].
///
/// Precondition violations on pure math operations (e.g. `p < 1` in
/// [`crate::index_space::p_norm`]) are programming errors and panic instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An exponent parameter is outside its admissible range.
    #[error("exponent out of domain: {message} (got p = {p})")]
    ExponentDomain { p: f64, message: &'static str },

    /// The radius `c` of a bounded-family functional lies below the p-norm of its center.
    #[error("radius c = {c} is below the p-norm of z ({z_norm}) beyond tolerance")]
    RadiusBelowNorm { c: f64, z_norm: f64 },

    /// The dual-norm bound on a linear functional is violated.
    #[error("q-norm of mu is {mu_norm}, which exceeds 1 beyond tolerance")]
    DualNormExceedsOne { mu_norm: f64 },

    /// A schedule, probe count, or tolerance field fails its structural invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
