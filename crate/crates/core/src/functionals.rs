//! The closed-form metric-functional families on ℓp.
//!
//! Every functional here is a pointwise limit of internal functionals
//! h_y(x) = ‖x−y‖_p − ‖y‖_p and is evaluated on finite-support probes.
//! Three non-internal families exist:
//!
//!  * [`L1LimitFunctional`] — the p = 1 catalog: a sign ε(j) on a set I of
//!    coordinates and an anchor value z(j) elsewhere,
//!    h(x) = Σ_{j∈I} ε(j)x(j) + Σ_{j∉I} (|x(j)−z(j)| − |z(j)|).
//!  * [`LpFiniteFunctional`] — bounded-net limits for p > 1,
//!    h(x) = (‖x−z‖_p^p + c^p − ‖z‖_p^p)^{1/p} − c with c ≥ ‖z‖_p.
//!  * [`LinearFunctional`] — unbounded-net limits for p > 1,
//!    h(x) = −Σ μ(j)x(j) with ‖μ‖_q ≤ 1, q the conjugate exponent.
//!
//! Evaluation never forms ‖x−z‖_p^p and c^p − ‖z‖_p^p separately: the
//! difference sum S = Σ_{j∈support(x)} (|x(j)−z(j)|^p − |z(j)|^p) is
//! accumulated once and the outer root goes through a log1p/expm1 form when
//! the relative offset is small. This keeps h accurate when c ≫ ‖x‖.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_space::{
    dual_pairing, p_norm, p_norm_pow, pow_abs, q_conjugate, root, Accumulator, Index, SparseVector,
    TailVector,
};

/// Absolute tolerance for the c = ‖z‖_p coincidence in [`MetricFunctional::canonicalize`].
pub const COINCIDENCE_TOL: f64 = 1e-12;

/// Constructor slack: `c < ‖z‖_p − RADIUS_SLACK` is rejected rather than clamped.
pub const RADIUS_SLACK: f64 = 1e-12;

/// Slack on the dual-norm bound ‖μ‖_q ≤ 1.
pub const DUAL_NORM_SLACK: f64 = 1e-12;

/// A coordinate sign, exactly ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            -1 => Ok(Sign::Minus),
            1 => Ok(Sign::Plus),
            other => Err(format!("sign must be -1 or +1, got {other}")),
        }
    }
}

/// Per-coordinate behavior of an ℓ1 limit functional: either a sign ε(j)
/// (the coordinate belongs to I) or an anchor value z(j).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordMode {
    Sign(Sign),
    Anchor(f64),
}

impl CoordMode {
    pub fn is_sign(self) -> bool {
        matches!(self, CoordMode::Sign(_))
    }
}

/// The ℓ1 family h^{I,ε,z}: overrides on finitely many coordinates plus a
/// default mode shared by every other index.
///
/// Canonical form: no override equals the default mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawL1Limit")]
pub struct L1LimitFunctional {
    overrides: BTreeMap<Index, CoordMode>,
    default: CoordMode,
}

#[derive(Deserialize)]
struct RawL1Limit {
    overrides: BTreeMap<Index, CoordMode>,
    default: CoordMode,
}

impl From<RawL1Limit> for L1LimitFunctional {
    fn from(raw: RawL1Limit) -> Self {
        L1LimitFunctional::new(
            raw.default,
            raw.overrides.into_iter().map(|(j, m)| (j.0, m)),
        )
    }
}

impl L1LimitFunctional {
    /// Builds the functional, dropping overrides equal to the default mode.
    pub fn new<I>(default: CoordMode, overrides: I) -> Self
    where
        I: IntoIterator<Item = (u64, CoordMode)>,
    {
        let overrides = overrides
            .into_iter()
            .filter(|&(_, m)| m != default)
            .map(|(j, m)| (Index(j), m))
            .collect();
        L1LimitFunctional { overrides, default }
    }

    /// The internal functional h_z for z ∈ c00, expressed in this family
    /// (all-anchor, tail 0).
    pub fn internal(z: &SparseVector) -> Self {
        Self::new(
            CoordMode::Anchor(0.0),
            z.iter().map(|(j, v)| (j.0, CoordMode::Anchor(v))),
        )
    }

    pub fn default_mode(&self) -> CoordMode {
        self.default
    }

    pub fn overrides(&self) -> impl Iterator<Item = (Index, CoordMode)> + '_ {
        self.overrides.iter().map(|(&j, &m)| (j, m))
    }

    /// Mode of an arbitrary coordinate.
    pub fn mode(&self, j: Index) -> CoordMode {
        self.overrides.get(&j).copied().unwrap_or(self.default)
    }

    /// True iff some coordinate (equivalently: an override or the default)
    /// carries a sign.
    pub fn has_sign_modes(&self) -> bool {
        self.default.is_sign() || self.overrides.values().any(|m| m.is_sign())
    }

    /// Smallest coordinate whose mode is a sign, if any.
    pub fn first_sign_coordinate(&self) -> Option<(Index, Sign)> {
        let horizon = self
            .overrides
            .keys()
            .next_back()
            .map(|j| j.0 + 2)
            .unwrap_or(1);
        (0..horizon).find_map(|j| match self.mode(Index(j)) {
            CoordMode::Sign(s) => Some((Index(j), s)),
            CoordMode::Anchor(_) => None,
        })
    }

    /// The anchor vector z ∈ ℝ^{J∖I} as a tail vector, available when the
    /// default mode is an anchor (otherwise J∖I is finite and the tail
    /// representation does not apply).
    pub fn anchor_vector(&self) -> Option<TailVector> {
        match self.default {
            CoordMode::Sign(_) => None,
            CoordMode::Anchor(tail) => Some(TailVector::from_overrides(
                tail,
                self.overrides.iter().filter_map(|(&j, &m)| match m {
                    CoordMode::Anchor(a) => Some((j.0, a)),
                    CoordMode::Sign(_) => None,
                }),
            )),
        }
    }

    /// h^{I,ε,z}(x) = Σ_{j∈I} ε(j)x(j) + Σ_{j∉I} (|x(j)−z(j)| − |z(j)|).
    ///
    /// Every term vanishes where x(j) = 0, so the sum runs over support(x).
    pub fn evaluate(&self, x: &SparseVector) -> f64 {
        let mut acc = Accumulator::default();
        for (j, v) in x.iter() {
            match self.mode(j) {
                CoordMode::Sign(s) => acc.add(s.value() * v),
                CoordMode::Anchor(a) => acc.add((v - a).abs() - a.abs()),
            }
        }
        acc.total()
    }
}

/// The bounded-net family h^{z,c} for p > 1, with center z and radius c ≥ ‖z‖_p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpFiniteFunctional {
    p: f64,
    z: SparseVector,
    c: f64,
}

impl LpFiniteFunctional {
    pub fn new(p: f64, z: SparseVector, c: f64) -> Result<Self> {
        if p <= 1.0 || !p.is_finite() {
            return Err(Error::ExponentDomain {
                p,
                message: "bounded-family functionals require p > 1",
            });
        }
        let z_norm = p_norm(&z, p);
        if c < z_norm - RADIUS_SLACK {
            return Err(Error::RadiusBelowNorm { c, z_norm });
        }
        Ok(LpFiniteFunctional { p, z, c })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn z(&self) -> &SparseVector {
        &self.z
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// (c^p − ‖z‖_p^p)^{1/p}, the mass a witness places on a fresh coordinate.
    pub fn fresh_mass(&self) -> f64 {
        root(
            (pow_abs(self.c, self.p) - p_norm_pow(&self.z, self.p)).max(0.0),
            self.p,
        )
    }

    /// h^{z,c}(x) = (‖x−z‖_p^p + c^p − ‖z‖_p^p)^{1/p} − c, via the stable
    /// difference sum over support(x).
    pub fn evaluate(&self, x: &SparseVector) -> f64 {
        let s = difference_sum(self.p, &self.z, x);
        root_offset(self.p, pow_abs(self.c, self.p), self.c, s)
    }
}

/// The unbounded-net family h^μ(x) = −Σ μ(j)x(j) for p > 1, with ‖μ‖_q ≤ 1.
/// μ = 0 gives the zero functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFunctional {
    p: f64,
    mu: SparseVector,
}

impl LinearFunctional {
    pub fn new(p: f64, mu: SparseVector) -> Result<Self> {
        if p <= 1.0 || !p.is_finite() {
            return Err(Error::ExponentDomain {
                p,
                message: "linear functionals require p > 1",
            });
        }
        let mu_norm = p_norm(&mu, q_conjugate(p));
        if mu_norm > 1.0 + DUAL_NORM_SLACK {
            return Err(Error::DualNormExceedsOne { mu_norm });
        }
        Ok(LinearFunctional { p, mu })
    }

    /// The zero functional on ℓp.
    pub fn zero(p: f64) -> Result<Self> {
        Self::new(p, SparseVector::new())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> &SparseVector {
        &self.mu
    }

    pub fn evaluate(&self, x: &SparseVector) -> f64 {
        -dual_pairing(&self.mu, x)
    }
}

/// Finite metric functionals are bounded below; functionals at infinity
/// have infimum −∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Finite,
    AtInfinity,
}

/// An element of the metric compactification of ℓp, tagged by family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MetricFunctional {
    /// h_y(x) = ‖x−y‖_p − ‖y‖_p for an actual point y of the space.
    Internal {
        p: f64,
        y: SparseVector,
    },
    L1Limit(L1LimitFunctional),
    LpFinite(LpFiniteFunctional),
    Linear(LinearFunctional),
}

impl From<L1LimitFunctional> for MetricFunctional {
    fn from(f: L1LimitFunctional) -> Self {
        MetricFunctional::L1Limit(f)
    }
}

impl From<LpFiniteFunctional> for MetricFunctional {
    fn from(f: LpFiniteFunctional) -> Self {
        MetricFunctional::LpFinite(f)
    }
}

impl From<LinearFunctional> for MetricFunctional {
    fn from(f: LinearFunctional) -> Self {
        MetricFunctional::Linear(f)
    }
}

impl MetricFunctional {
    pub fn internal(p: f64, y: SparseVector) -> Result<Self> {
        if p < 1.0 || !p.is_finite() {
            return Err(Error::ExponentDomain {
                p,
                message: "internal functionals require p >= 1",
            });
        }
        Ok(MetricFunctional::Internal { p, y })
    }

    /// The exponent of the underlying ℓp space (1 for the ℓ1 family).
    pub fn exponent(&self) -> f64 {
        match self {
            MetricFunctional::Internal { p, .. } => *p,
            MetricFunctional::L1Limit(_) => 1.0,
            MetricFunctional::LpFinite(f) => f.p(),
            MetricFunctional::Linear(f) => f.p(),
        }
    }

    /// Re-checks every constructor invariant. Deserialized values should be
    /// validated before use; in-process constructors already enforce these.
    pub fn validate(&self) -> Result<()> {
        match self {
            MetricFunctional::Internal { p, .. } => {
                if *p < 1.0 || !p.is_finite() {
                    return Err(Error::ExponentDomain {
                        p: *p,
                        message: "internal functionals require p >= 1",
                    });
                }
                Ok(())
            }
            MetricFunctional::L1Limit(_) => Ok(()),
            MetricFunctional::LpFinite(f) => {
                LpFiniteFunctional::new(f.p, f.z.clone(), f.c).map(|_| ())
            }
            MetricFunctional::Linear(f) => LinearFunctional::new(f.p, f.mu.clone()).map(|_| ()),
        }
    }

    pub fn evaluate(&self, x: &SparseVector) -> f64 {
        match self {
            MetricFunctional::Internal { p, y } => evaluate_internal(*p, y, x),
            MetricFunctional::L1Limit(f) => f.evaluate(x),
            MetricFunctional::LpFinite(f) => f.evaluate(x),
            MetricFunctional::Linear(f) => f.evaluate(x),
        }
    }

    /// Partition of the compactification: finite functionals are bounded
    /// below, functionals at infinity are not. For the ℓ1 family the finite
    /// ones are exactly the sign-free, tail-zero members (which coincide with
    /// internal functionals); a linear functional is finite only when μ = 0.
    pub fn classify(&self) -> Classification {
        match self {
            MetricFunctional::Internal { .. } | MetricFunctional::LpFinite(_) => {
                Classification::Finite
            }
            MetricFunctional::Linear(f) => {
                if f.mu.is_zero() {
                    Classification::Finite
                } else {
                    Classification::AtInfinity
                }
            }
            MetricFunctional::L1Limit(f) => {
                if !f.has_sign_modes()
                    && f.anchor_vector().is_some_and(|z| z.is_finitely_supported())
                {
                    Classification::Finite
                } else {
                    Classification::AtInfinity
                }
            }
        }
    }

    /// Closed-form infimum over the space: −‖y‖_p for internal functionals
    /// (attained at x = y), (c^p − ‖z‖_p^p)^{1/p} − c for the bounded family
    /// (attained at x = z), −∞ for everything at infinity, 0 for the zero
    /// functional.
    pub fn analytic_infimum(&self) -> f64 {
        match self {
            MetricFunctional::Internal { p, y } => -p_norm(y, *p),
            MetricFunctional::LpFinite(f) => {
                root_offset(f.p, pow_abs(f.c, f.p), f.c, -p_norm_pow(&f.z, f.p))
            }
            MetricFunctional::Linear(f) => {
                if f.mu.is_zero() {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            MetricFunctional::L1Limit(f) => match self.classify() {
                Classification::AtInfinity => f64::NEG_INFINITY,
                Classification::Finite => {
                    let z = f
                        .anchor_vector()
                        .and_then(|t| t.to_sparse())
                        .expect("finite l1 limits have a sparse anchor vector");
                    -p_norm(&z, 1.0)
                }
            },
        }
    }

    /// Rewrites coincident boundary representations as internal functionals:
    /// h^{z,‖z‖_p} = h_z, and a sign-free tail-zero ℓ1 limit is h_z for its
    /// anchor vector. Evaluation is preserved pointwise.
    pub fn canonicalize(self) -> MetricFunctional {
        match self {
            MetricFunctional::LpFinite(f) => {
                if (f.c - p_norm(&f.z, f.p)).abs() <= COINCIDENCE_TOL {
                    MetricFunctional::Internal { p: f.p, y: f.z }
                } else {
                    MetricFunctional::LpFinite(f)
                }
            }
            MetricFunctional::L1Limit(f) => {
                let sparse_anchor = if f.has_sign_modes() {
                    None
                } else {
                    f.anchor_vector().and_then(|t| t.to_sparse())
                };
                match sparse_anchor {
                    Some(z) => MetricFunctional::Internal { p: 1.0, y: z },
                    None => MetricFunctional::L1Limit(f),
                }
            }
            other => other,
        }
    }
}

/// h_y(x) = ‖x−y‖_p − ‖y‖_p in cancellation-stable difference form.
///
/// Panics if `p < 1`.
pub fn evaluate_internal(p: f64, y: &SparseVector, x: &SparseVector) -> f64 {
    assert!(p >= 1.0, "internal functionals require p >= 1, got {p}");
    if p == 1.0 {
        // The −‖y‖₁ term cancels coordinatewise; no outer root exists.
        let mut acc = Accumulator::default();
        for (j, v) in x.iter() {
            let w = y.get(j);
            acc.add((v - w).abs() - w.abs());
        }
        return acc.total();
    }
    let s = difference_sum(p, y, x);
    let t = p_norm_pow(y, p);
    root_offset(p, t, root(t, p), s)
}

/// S = Σ_{j∈support(x)} (|x(j)−z(j)|^p − |z(j)|^p). Terms off support(x)
/// vanish exactly and are skipped.
fn difference_sum(p: f64, z: &SparseVector, x: &SparseVector) -> f64 {
    let mut acc = Accumulator::default();
    for (j, v) in x.iter() {
        let w = z.get(j);
        acc.add(pow_abs(v - w, p) - pow_abs(w, p));
    }
    acc.total()
}

/// (cp + s)^{1/p} − c, where cp is the p-th power mass whose root is c.
///
/// For small relative offsets the value is c·((1 + s/cp)^{1/p} − 1) computed
/// through log1p/expm1; s/cp = −1 collapses to −c exactly, which is what
/// makes evaluation at the minimizer bit-identical to the closed-form
/// infimum.
pub(crate) fn root_offset(p: f64, cp: f64, c: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    if cp == 0.0 {
        // s is a plain power sum here, nonnegative up to rounding.
        return root(s.max(0.0), p);
    }
    if p == 1.0 {
        return s;
    }
    let r = (s / cp).max(-1.0);
    if r < 0.5 {
        c * (r.ln_1p() / p).exp_m1()
    } else {
        root(cp + s, p) - c
    }
}
