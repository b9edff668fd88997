//! Constructive witness sequences.
//!
//! Each non-internal functional family comes with an explicit sequence
//! y_1, y_2, … of actual points whose internal functionals h_{y_s} converge
//! pointwise to the family member. The "moving" coordinate of every witness
//! is chosen fresh — outside the supports of the functional's data — in
//! increasing order, which turns the asymptotic statements into finitely
//! checkable ones: for the bounded families the error vanishes outright once
//! the fresh index clears the probe's support.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    CoordMode, L1LimitFunctional, LinearFunctional, LpFiniteFunctional, MetricFunctional,
};
use crate::index_space::{
    nth_fresh_index, p_norm_pow, pow_abs, q_conjugate, root, Index, SparseVector,
};

/// Strictly increasing sequence parameters (net stages, e.g. powers of two).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WitnessSchedule {
    steps: Vec<u64>,
}

impl WitnessSchedule {
    pub fn new(steps: Vec<u64>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidConfig("schedule must be nonempty".into()));
        }
        if steps[0] == 0 || steps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "schedule steps must be positive and strictly increasing".into(),
            ));
        }
        Ok(WitnessSchedule { steps })
    }

    /// Powers of two 2^lo, …, 2^hi.
    pub fn geometric(lo_exp: u32, hi_exp: u32) -> Self {
        WitnessSchedule {
            steps: (lo_exp..=hi_exp).map(|e| 1u64 << e).collect(),
        }
    }

    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.steps.clone()).map(|_| ())
    }
}

impl Default for WitnessSchedule {
    /// The default lab schedule {2⁴, 2⁵, …, 2¹²}.
    fn default() -> Self {
        WitnessSchedule::geometric(4, 12)
    }
}

/// The ℓ1 net y_F along the initial segment F = {0, …, size−1}:
/// y_F(j) = −ε(j)·#F on sign coordinates, z(j) on anchor coordinates,
/// 0 off F. Initial segments are cofinal in the directed set of finite
/// subsets, so this linearization suffices for limits.
pub fn l1_witness(f: &L1LimitFunctional, size: u64) -> SparseVector {
    assert!(size >= 1, "net stages are 1-based");
    let card = size as f64;
    let mut y = SparseVector::new();
    for j in 0..size {
        let value = match f.mode(Index(j)) {
            CoordMode::Sign(eps) => -eps.value() * card,
            CoordMode::Anchor(a) => a,
        };
        y.set(Index(j), value);
    }
    y
}

/// The bounded-family witness: y_m equals z except at the m-th fresh index
/// j_m outside support(z), where it carries the extra mass
/// a = (c^p − ‖z‖_p^p)^{1/p}. Then ‖y_m‖_p^p = c^p and h_{y_m}(x) = h^{z,c}(x)
/// exactly once j_m is off support(x).
pub fn lp_bounded_witness(f: &LpFiniteFunctional, m: u64) -> SparseVector {
    assert!(m >= 1, "net stages are 1-based");
    let j_m = nth_fresh_index(f.z().support(), m);
    let mut y = f.z().clone();
    y.set(j_m, f.fresh_mass() + f.z().get(j_m));
    y
}

/// Hilbert-space form of the bounded witness: y_n = (c²−‖z‖²)^{1/2} u_n + z
/// with u_n the n-th fresh basis vector outside support(z). Coincides with
/// [`lp_bounded_witness`] at p = 2 and shares its code path.
pub fn hilbert_finite_witness(z: &SparseVector, c: f64, n: u64) -> Result<SparseVector> {
    let f = LpFiniteFunctional::new(2.0, z.clone(), c)?;
    Ok(lp_bounded_witness(&f, n))
}

/// The norming construction behind the linear-family witness: μ_m tops μ up
/// to unit q-norm at the m-th fresh index, and z_m is its image under the
/// explicit ℓq → ℓp duality map v ↦ sign(v)|v|^{q−1}, so that ‖z_m‖_p = 1 and
/// ⟨μ_m, z_m⟩ = 1 in closed form (no Hahn–Banach selection).
pub fn linear_norming_pair(f: &LinearFunctional, m: u64) -> (SparseVector, SparseVector) {
    assert!(m >= 1, "net stages are 1-based");
    let q = q_conjugate(f.p());
    let mass_q = p_norm_pow(f.mu(), q);
    let j_m = nth_fresh_index(f.mu().support(), m);

    let mut mu_m = f.mu().clone();
    let gap = (1.0 - mass_q).max(0.0);
    if gap > 0.0 {
        mu_m.set(j_m, root(gap, q));
    }

    let mut z_m = SparseVector::new();
    for (j, v) in mu_m.iter() {
        z_m.set(j, pow_abs(v, q - 1.0).copysign(v));
    }
    (mu_m, z_m)
}

/// The unbounded witness y_m = m·z_m; h_{y_m}(x) → −Σ μ(j)x(j).
pub fn linear_witness(f: &LinearFunctional, m: u64) -> SparseVector {
    let (_, z_m) = linear_norming_pair(f, m);
    z_m.scale(m as f64)
}

/// The worked ℓ1 example's sequences, in 0-based indexing:
/// y_n = (1, 0, …, 0, n, 0, …) with n at position n−1, and
/// ỹ_n = (n, 1, 1, …, 1, 0, …) with ones at positions 1, …, n−1.
/// Both norms diverge, yet h_{y_n} has an internal limit while h_{ỹ_n}
/// converges to a functional at infinity.
pub fn example_34_sequences(n: u64) -> (SparseVector, SparseVector) {
    assert!(n >= 1, "sequences are 1-based");
    let mut y = SparseVector::new();
    y.set(Index(0), 1.0);
    y.set(Index(n - 1), n as f64);

    let mut y_tilde = SparseVector::new();
    y_tilde.set(Index(0), n as f64);
    for j in 1..n {
        y_tilde.set(Index(j), 1.0);
    }
    (y, y_tilde)
}

/// Witness for an arbitrary functional at one net stage. Internal
/// functionals need no approximation and return `None`.
pub fn witness_for(f: &MetricFunctional, step: u64) -> Option<SparseVector> {
    match f {
        MetricFunctional::Internal { .. } => None,
        MetricFunctional::L1Limit(f) => Some(l1_witness(f, step)),
        MetricFunctional::LpFinite(f) => Some(lp_bounded_witness(f, step)),
        MetricFunctional::Linear(f) => Some(linear_witness(f, step)),
    }
}
