//! Seeded generation of probe vectors and functional batteries.
//!
//! Suites are reproducible: every generator takes an explicit seed and runs
//! on ChaCha8, and the default probe box confines supports to {0..49} with
//! magnitudes in [−10, 10] so that witness fresh indices clear probe supports
//! at moderate schedule steps. Exactness-critical suites snap values to a
//! dyadic grid, keeping ℓ1 arithmetic exact in binary64.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::functionals::{
    CoordMode, L1LimitFunctional, LinearFunctional, LpFiniteFunctional, MetricFunctional, Sign,
};
use crate::index_space::{p_norm, q_conjugate, SparseVector};

/// Fixed default seed for the reproducible suites.
pub const DEFAULT_SEED: u64 = 42;

/// Shape of a random c00 probe family.
#[derive(Debug, Clone)]
pub struct ProbeSpec {
    pub count: usize,
    /// Supports are subsets of {0, …, max_index}.
    pub max_index: u64,
    pub max_support: usize,
    /// Values are uniform in [−amplitude, amplitude].
    pub amplitude: f64,
    /// When set, values are snapped to multiples of 2^−grid_log2 (nonzero).
    pub grid_log2: Option<u32>,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            count: 20,
            max_index: 49,
            max_support: 10,
            amplitude: 10.0,
            grid_log2: None,
        }
    }
}

impl ProbeSpec {
    /// Default box, snapped to the 1/64 dyadic grid.
    pub fn dyadic() -> Self {
        ProbeSpec {
            grid_log2: Some(6),
            ..ProbeSpec::default()
        }
    }
}

fn sample_value(rng: &mut ChaCha8Rng, amplitude: f64, grid_log2: Option<u32>) -> f64 {
    match grid_log2 {
        None => loop {
            let v = rng.random_range(-amplitude..=amplitude);
            if v != 0.0 {
                return v;
            }
        },
        Some(g) => {
            let scale = (1u64 << g) as f64;
            let bound = (amplitude * scale) as i64;
            loop {
                let k = rng.random_range(-bound..=bound);
                if k != 0 {
                    return k as f64 / scale;
                }
            }
        }
    }
}

fn sample_one(rng: &mut ChaCha8Rng, spec: &ProbeSpec) -> SparseVector {
    let support_size = rng.random_range(1..=spec.max_support);
    let mut indices = std::collections::BTreeSet::new();
    while indices.len() < support_size {
        indices.insert(rng.random_range(0..=spec.max_index));
    }
    let mut x = SparseVector::new();
    for j in indices {
        x.set(j.into(), sample_value(rng, spec.amplitude, spec.grid_log2));
    }
    x
}

/// A seeded family of nonzero c00 probes.
pub fn sample(spec: &ProbeSpec, seed: u64) -> Vec<SparseVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..spec.count)
        .map(|_| sample_one(&mut rng, spec))
        .collect()
}

/// Which families a battery should contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyFilter {
    All,
    Internal,
    L1Limit,
    LpFinite,
    Linear,
}

impl std::str::FromStr for FamilyFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(FamilyFilter::All),
            "internal" => Ok(FamilyFilter::Internal),
            "l1" | "l1_limit" => Ok(FamilyFilter::L1Limit),
            "lp" | "lp_finite" => Ok(FamilyFilter::LpFinite),
            "linear" => Ok(FamilyFilter::Linear),
            other => Err(format!(
                "unknown family {other:?} (expected all|internal|l1|lp|linear)"
            )),
        }
    }
}

const EXPONENTS: [f64; 3] = [1.5, 2.0, 3.0];

fn internal_battery(rng: &mut ChaCha8Rng, count: usize) -> Vec<MetricFunctional> {
    let spec = ProbeSpec::default();
    (0..count)
        .map(|i| {
            let p = [1.0, 1.5, 2.0, 3.0][i % 4];
            let y = if i == 0 {
                SparseVector::new()
            } else {
                sample_one(rng, &spec)
            };
            MetricFunctional::internal(p, y).expect("p >= 1 by construction")
        })
        .collect()
}

fn lp_finite_battery(rng: &mut ChaCha8Rng, count: usize) -> Vec<MetricFunctional> {
    let spec = ProbeSpec::default();
    (0..count)
        .map(|i| {
            let p = EXPONENTS[i % 3];
            let z = if i % 7 == 0 {
                SparseVector::new()
            } else {
                sample_one(rng, &spec)
            };
            // Every third member sits exactly on the internal coincidence c = ‖z‖_p.
            let delta = if i % 3 == 0 {
                0.0
            } else {
                rng.random_range(0.01..=5.0)
            };
            LpFiniteFunctional::new(p, z.clone(), p_norm(&z, p) + delta)
                .expect("c >= norm by construction")
                .into()
        })
        .collect()
}

fn linear_battery(rng: &mut ChaCha8Rng, count: usize) -> Vec<MetricFunctional> {
    let spec = ProbeSpec::default();
    let mut out: Vec<MetricFunctional> = Vec::with_capacity(count);
    for (i, &p) in EXPONENTS.iter().enumerate() {
        out.push(LinearFunctional::zero(p).expect("p > 1").into());
        out.push(
            LinearFunctional::new(p, SparseVector::basis(i as u64))
                .expect("unit basis vector has unit dual norm")
                .into(),
        );
    }
    while out.len() < count {
        let p = EXPONENTS[out.len() % 3];
        let q = q_conjugate(p);
        let mu = sample_one(rng, &spec);
        let target = rng.random_range(0.2..=1.0);
        let scaled = mu.scale(target / p_norm(&mu, q));
        out.push(
            LinearFunctional::new(p, scaled)
                .expect("scaled to dual norm <= 1")
                .into(),
        );
    }
    out
}

fn l1_limit_battery(rng: &mut ChaCha8Rng, count: usize) -> Vec<MetricFunctional> {
    let spec = ProbeSpec {
        max_support: 5,
        ..ProbeSpec::default()
    };
    let tail = |rng: &mut ChaCha8Rng| {
        let t: f64 = rng.random_range(0.25..=2.0);
        if rng.random_bool(0.5) {
            -t
        } else {
            t
        }
    };
    (0..count)
        .map(|i| {
            let anchors = sample_one(rng, &spec);
            let anchor_overrides = anchors
                .iter()
                .map(|(j, v)| (j.0, CoordMode::Anchor(v)))
                .collect::<Vec<_>>();
            let f = match i % 4 {
                // Sign-free, tail 0: coincides with an internal functional.
                0 => L1LimitFunctional::new(CoordMode::Anchor(0.0), anchor_overrides),
                // Sign-free, nonzero tail: at infinity through the anchor mass.
                1 => L1LimitFunctional::new(CoordMode::Anchor(tail(rng)), anchor_overrides),
                // Sign overrides on an anchored default.
                2 => {
                    let mut overrides = anchor_overrides;
                    let sign_count = rng.random_range(1..=3u32);
                    for k in 0..sign_count {
                        let s = if rng.random_bool(0.5) {
                            Sign::Plus
                        } else {
                            Sign::Minus
                        };
                        overrides.push((50 + k as u64, CoordMode::Sign(s)));
                    }
                    let default = if rng.random_bool(0.5) {
                        CoordMode::Anchor(0.0)
                    } else {
                        CoordMode::Anchor(tail(rng))
                    };
                    L1LimitFunctional::new(default, overrides)
                }
                // Sign default: cofinitely many sign coordinates.
                _ => {
                    let s = if rng.random_bool(0.5) {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    };
                    L1LimitFunctional::new(CoordMode::Sign(s), anchor_overrides)
                }
            };
            f.into()
        })
        .collect()
}

/// A seeded battery covering the requested families. `FamilyFilter::All`
/// yields ≥ 200 functionals spread over all four families, including the
/// boundary cases (zero functional, unit dual norm, c = ‖z‖_p coincidences,
/// sign-free ℓ1 limits with and without tail).
pub fn battery(filter: FamilyFilter, seed: u64) -> Vec<MetricFunctional> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match filter {
        FamilyFilter::Internal => internal_battery(&mut rng, 40),
        FamilyFilter::LpFinite => lp_finite_battery(&mut rng, 60),
        FamilyFilter::Linear => linear_battery(&mut rng, 56),
        FamilyFilter::L1Limit => l1_limit_battery(&mut rng, 60),
        FamilyFilter::All => {
            let mut out = internal_battery(&mut rng, 40);
            out.extend(lp_finite_battery(&mut rng, 60));
            out.extend(linear_battery(&mut rng, 56));
            out.extend(l1_limit_battery(&mut rng, 60));
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::Classification;

    #[test]
    fn probes_are_reproducible_and_in_the_box() {
        let spec = ProbeSpec::default();
        let a = sample(&spec, DEFAULT_SEED);
        let b = sample(&spec, DEFAULT_SEED);
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
        for x in &a {
            assert!(!x.is_zero());
            assert!(x.support_size() <= 10);
            assert!(x.max_support_index().unwrap().0 <= 49);
            for (_, v) in x.iter() {
                assert!(v.abs() <= 10.0 && v != 0.0);
            }
        }
        assert_ne!(a, sample(&spec, DEFAULT_SEED + 1));
    }

    #[test]
    fn dyadic_probes_sit_on_the_grid() {
        for x in sample(&ProbeSpec::dyadic(), DEFAULT_SEED) {
            for (_, v) in x.iter() {
                let scaled = v * 64.0;
                assert_eq!(scaled, scaled.trunc(), "value {v} is off the 1/64 grid");
            }
        }
    }

    #[test]
    fn full_battery_covers_all_families() {
        let battery = battery(FamilyFilter::All, DEFAULT_SEED);
        assert!(battery.len() >= 200);
        for f in &battery {
            f.validate().expect("battery members satisfy invariants");
        }
        let mut internal = 0;
        let mut l1_at_infinity = 0;
        let mut l1_internal_coincidence = 0;
        for f in &battery {
            match f {
                MetricFunctional::Internal { .. } => internal += 1,
                MetricFunctional::L1Limit(g) => {
                    if g.has_sign_modes() {
                        assert_eq!(f.classify(), Classification::AtInfinity);
                        l1_at_infinity += 1;
                    } else if f.clone().canonicalize() != MetricFunctional::L1Limit(g.clone()) {
                        l1_internal_coincidence += 1;
                    }
                }
                _ => {}
            }
        }
        assert!(internal >= 40);
        assert!(l1_at_infinity >= 15);
        assert!(l1_internal_coincidence >= 15);
    }
}
