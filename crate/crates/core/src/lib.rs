//! Metric functionals (horofunctions) on infinite-dimensional ℓp spaces,
//! 1 ≤ p < ∞.
//!
//! The crate carries the complete catalog of metric functionals on ℓp —
//! internal functionals h_y, the ℓ1 sign/anchor family, the bounded h^{z,c}
//! family for p > 1, and the linear family h^μ at infinity — together with
//! the constructive witness sequences that realize each one as a pointwise
//! limit of internal functionals, and a verification lab that confirms the
//! convergence and invariance claims numerically at desk scale.
//!
//! Everything is evaluated on finite-support probes (c00 vectors); the
//! extension to all of ℓp follows from density and the 1-Lipschitz property
//! and is not materialized numerically.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so sharing across threads needs no synchronization.

pub mod error;
pub mod functionals;
pub mod index_space;
pub mod lab;
pub mod probes;
pub mod witnesses;

pub use error::{Error, Result};
pub use functionals::{
    evaluate_internal, Classification, CoordMode, L1LimitFunctional, LinearFunctional,
    LpFiniteFunctional, MetricFunctional, Sign,
};
pub use index_space::{
    axpy, dual_pairing, fresh_indices, p_norm, p_norm_pow, q_conjugate, Index, SparseVector,
    TailVector,
};
pub use lab::{
    base_point_identity_check, infimum_bracket, lipschitz_check, log_log_slope, one_dim_at,
    one_dim_limit, radon_riesz_check, run_convergence, ConvergenceReport, Direction,
};
pub use witnesses::{
    example_34_sequences, hilbert_finite_witness, l1_witness, linear_norming_pair, linear_witness,
    lp_bounded_witness, witness_for, WitnessSchedule,
};
