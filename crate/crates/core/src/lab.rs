//! Numerical verification harness.
//!
//! Convergence runs pit a family's closed-form evaluator against the internal
//! functionals of its witness sequence; the remaining checks are the small
//! analytic oracles: the one-dimensional limit table, the norm-displacement
//! identity for Hilbert witnesses, the base-point change identity, and a
//! probe-based infimum bracket that cross-checks the Finite/AtInfinity
//! classification.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::functionals::{evaluate_internal, MetricFunctional};
use crate::index_space::{p_norm, p_norm_pow, pow_abs, q_conjugate, SparseVector};
use crate::probes::{sample, ProbeSpec};
use crate::witnesses::{hilbert_finite_witness, witness_for, WitnessSchedule};

/// Direction of divergence for the one-dimensional limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    PlusInfinity,
    MinusInfinity,
}

/// Limit of |r − a| − |a| as a → ±∞: the one-dimensional horofunction table.
pub fn one_dim_limit(r: f64, direction: Direction) -> f64 {
    match direction {
        Direction::PlusInfinity => -r,
        Direction::MinusInfinity => r,
    }
}

/// The finite evaluator |r − a| − |a| whose limits [`one_dim_limit`] tabulates.
pub fn one_dim_at(r: f64, a: f64) -> f64 {
    (r - a).abs() - a.abs()
}

/// Per-functional error trajectory of h_{y_s}(x) → h(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub functional: MetricFunctional,
    pub probes: Vec<SparseVector>,
    pub schedule: WitnessSchedule,
    /// errors[probe][step] = |h_{y_s}(x) − h(x)|, nonnegative.
    pub errors: Vec<Vec<f64>>,
    pub sup_error_per_step: Vec<f64>,
    pub passed: bool,
    pub tolerance: f64,
}

impl ConvergenceReport {
    /// Two-column CSV `step,sup_error`, numbers in shortest round-trip decimal.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,sup_error\n");
        for (step, sup) in self.schedule.steps().iter().zip(&self.sup_error_per_step) {
            out.push_str(&format!("{step},{sup}\n"));
        }
        out
    }
}

/// Runs the witness net of `f` over `schedule`, recording |h_{y_s}(x) − h(x)|
/// for every probe. Internal functionals are their own witnesses at every
/// stage, so their report is trivially zero-error and passes.
pub fn run_convergence(
    f: &MetricFunctional,
    probes: &[SparseVector],
    schedule: &WitnessSchedule,
    tolerance: f64,
) -> ConvergenceReport {
    let p = f.exponent();
    let limits: Vec<f64> = probes.iter().map(|x| f.evaluate(x)).collect();

    let mut errors = vec![Vec::with_capacity(schedule.steps().len()); probes.len()];
    let mut sup_error_per_step = Vec::with_capacity(schedule.steps().len());
    for &step in schedule.steps() {
        let witness = witness_for(f, step);
        let mut sup = 0.0f64;
        for (i, x) in probes.iter().enumerate() {
            let err = match &witness {
                Some(y) => (evaluate_internal(p, y, x) - limits[i]).abs(),
                None => 0.0,
            };
            errors[i].push(err);
            sup = sup.max(err);
        }
        sup_error_per_step.push(sup);
    }

    let passed = sup_error_per_step
        .last()
        .is_none_or(|&last| last <= tolerance);
    ConvergenceReport {
        functional: f.clone(),
        probes: probes.to_vec(),
        schedule: schedule.clone(),
        errors,
        sup_error_per_step,
        passed,
        tolerance,
    }
}

/// Max of |h(x) − h(x′)| / ‖x − x′‖_p over seeded random pairs.
pub fn lipschitz_check(f: &MetricFunctional, pair_count: usize, seed: u64) -> f64 {
    let p = f.exponent();
    let spec = ProbeSpec {
        count: 2 * pair_count,
        ..ProbeSpec::default()
    };
    let pool = sample(&spec, seed);
    let mut max_ratio = 0.0f64;
    for pair in pool.chunks_exact(2) {
        let gap = p_norm(&pair[0].sub(&pair[1]), p);
        if gap == 0.0 {
            continue;
        }
        let ratio = (f.evaluate(&pair[0]) - f.evaluate(&pair[1])).abs() / gap;
        max_ratio = max_ratio.max(ratio);
    }
    max_ratio
}

/// Radon–Riesz displacement residuals ‖y_n − z‖₂² − (c² − ‖z‖₂²) per
/// schedule step; each should vanish because the witness moves all extra
/// mass onto one fresh coordinate.
pub fn radon_riesz_check(z: &SparseVector, c: f64, schedule: &WitnessSchedule) -> Result<Vec<f64>> {
    let target = c * c - p_norm_pow(z, 2.0);
    schedule
        .steps()
        .iter()
        .map(|&n| {
            let y = hilbert_finite_witness(z, c, n)?;
            Ok(p_norm_pow(&y.sub(z), 2.0) - target)
        })
        .collect()
}

/// Max deviation of the base-point change identity
/// (h_{0,y}(x) − h_{0,y}(b′)) = h_{b′,y}(x), where
/// h_{b,y}(x) = ‖x−y‖_p − ‖b−y‖_p.
pub fn base_point_identity_check(
    p: f64,
    y: &SparseVector,
    b_prime: &SparseVector,
    probes: &[SparseVector],
) -> f64 {
    let h0_at_b = evaluate_internal(p, y, b_prime);
    let shift = p_norm(&b_prime.sub(y), p);
    let mut max_dev = 0.0f64;
    for x in probes {
        let lhs = evaluate_internal(p, y, x) - h0_at_b;
        let rhs = p_norm(&x.sub(y), p) - shift;
        max_dev = max_dev.max((lhs - rhs).abs());
    }
    max_dev
}

/// Probe cap for the adaptive anchor-prefix ray (memory sanity).
const PREFIX_CAP: u64 = 1_000_000;

/// Minimum of h over a structured probe family: the origin, the analytic
/// minimizer candidate, and descent rays with magnitudes 10^0, …, 10^budget.
///
/// For finite functionals the result stays above `analytic_infimum − 1e−9`;
/// for functionals at infinity the rays push the value below
/// −10^(budget−1). The ray catalog per family:
///  * ℓ1 sign coordinate j₀: x = −t·ε(j₀)·e_{j₀} descends exactly at rate t;
///  * ℓ1 sign-free with nonzero anchor tail τ: prefixes of the anchor vector
///    (length adapted to 1/|τ|) descend at −k·|τ|;
///  * linear μ ≠ 0: both coordinate rays ±t·e_{j₀} and the normalized
///    duality ray t·ŵ with ⟨μ, ŵ⟩ = ‖μ‖_q.
pub fn infimum_bracket(f: &MetricFunctional, budget: u32) -> f64 {
    let mut candidates = vec![SparseVector::new()];

    match f {
        MetricFunctional::Internal { y, .. } => candidates.push(y.clone()),
        MetricFunctional::LpFinite(g) => candidates.push(g.z().clone()),
        MetricFunctional::Linear(g) if !g.mu().is_zero() => {
            let mu = g.mu();
            let (j0, _) = mu
                .iter()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .expect("nonzero mu has a largest coordinate");
            let q = q_conjugate(g.p());
            let mut w = SparseVector::new();
            for (j, v) in mu.iter() {
                w.set(j, pow_abs(v, q - 1.0).copysign(v));
            }
            let w_hat = w.scale(1.0 / p_norm(&w, g.p()));
            for e in 0..=budget {
                let t = 10f64.powi(e as i32);
                candidates.push(SparseVector::from_entries([(j0.0, t)]));
                candidates.push(SparseVector::from_entries([(j0.0, -t)]));
                candidates.push(w_hat.scale(t));
            }
        }
        MetricFunctional::Linear(_) => {}
        MetricFunctional::L1Limit(g) => {
            if let Some((j0, eps)) = g.first_sign_coordinate() {
                for e in 0..=budget {
                    let t = 10f64.powi(e as i32);
                    candidates.push(SparseVector::from_entries([(j0.0, -t * eps.value())]));
                }
            } else {
                let anchor = g
                    .anchor_vector()
                    .expect("sign-free l1 limits have an anchor vector");
                if let Some(z) = anchor.to_sparse() {
                    candidates.push(z);
                } else {
                    let tau = anchor.tail().abs();
                    let overrides = anchor.overrides().count() as u64;
                    for e in 0..=budget {
                        candidates.push(anchor.prefix(10u64.pow(e)));
                    }
                    let adaptive = (1.25 * 10f64.powi(budget as i32 - 1) / tau).ceil() as u64;
                    candidates.push(anchor.prefix((adaptive + overrides + 1).min(PREFIX_CAP)));
                }
            }
        }
    }

    candidates
        .iter()
        .map(|x| f.evaluate(x))
        .fold(f64::INFINITY, f64::min)
}

/// Least-squares slope of ln(y) against ln(x); points with y = 0 are skipped.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let points: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|&(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    assert!(
        points.len() >= 2,
        "slope fit needs at least two usable points"
    );
    let n = points.len() as f64;
    let mean_u = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_v = points.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = points.iter().map(|p| (p.0 - mean_u) * (p.1 - mean_v)).sum();
    let var: f64 = points.iter().map(|p| (p.0 - mean_u).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{
        Classification, CoordMode, L1LimitFunctional, LinearFunctional, LpFiniteFunctional, Sign,
    };
    use crate::index_space::Index;
    use crate::probes::{battery, FamilyFilter, DEFAULT_SEED};

    fn sv(pairs: &[(u64, f64)]) -> SparseVector {
        SparseVector::from_entries(pairs.iter().copied())
    }

    #[test]
    fn one_dim_limit_table() {
        assert_eq!(one_dim_limit(2.0, Direction::PlusInfinity), -2.0);
        assert_eq!(one_dim_limit(0.0, Direction::PlusInfinity), 0.0);
        assert_eq!(one_dim_limit(0.0, Direction::MinusInfinity), 0.0);
        assert_eq!(one_dim_limit(-0.5, Direction::MinusInfinity), -0.5);
        // Both operands exactly representable: the finite evaluator lands on
        // the limit without rounding.
        assert_eq!(one_dim_at(2.0, 1e12), -2.0);
    }

    #[test]
    fn one_dim_convergence_is_monotone() {
        for r in [2.0, -2.0, 0.5, -0.5] {
            for (dir, sign) in [
                (Direction::PlusInfinity, 1.0),
                (Direction::MinusInfinity, -1.0),
            ] {
                let limit = one_dim_limit(r, dir);
                let mut last = f64::INFINITY;
                for k in 1..=12 {
                    let a = sign * 10f64.powi(k);
                    let err = (one_dim_at(r, a) - limit).abs();
                    assert!(err <= last, "r={r}, a={a}: {err} > {last}");
                    last = err;
                }
                assert_eq!(last, 0.0);
            }
        }
    }

    #[test]
    fn convergence_bounded_family_is_eventually_exact() {
        let f: MetricFunctional = LpFiniteFunctional::new(2.0, SparseVector::new(), 1.0)
            .unwrap()
            .into();
        let probes = sample(&ProbeSpec::default(), DEFAULT_SEED);
        let schedule = WitnessSchedule::new(vec![64, 128]).unwrap();
        let report = run_convergence(&f, &probes, &schedule, 1e-6);
        assert!(report.passed);
        assert_eq!(report.sup_error_per_step, vec![0.0, 0.0]);
    }

    #[test]
    fn convergence_linear_rate_is_one_over_m() {
        let f: MetricFunctional = LinearFunctional::new(2.0, sv(&[(0, 1.0)])).unwrap().into();
        // Not collinear with μ, so the Taylor remainder ‖x‖²−⟨x,μ⟩² is nonzero.
        let probes = vec![sv(&[(0, 1.0), (1, 2.0)])];
        let schedule = WitnessSchedule::default();
        let report = run_convergence(&f, &probes, &schedule, 1e-2);
        assert!(report.passed);
        let steps: Vec<f64> = schedule.steps().iter().map(|&s| s as f64).collect();
        let slope = log_log_slope(&steps, &report.sup_error_per_step);
        assert!((-1.3..=-0.7).contains(&slope), "slope {slope}");
    }

    #[test]
    fn convergence_zero_functional_with_small_probes() {
        // h_{m·e}(x) = ‖x − m·e‖ − m → 0; the remainder scales with ‖x‖²/m,
        // so small probes pass tight tolerances by m = 2¹².
        let f: MetricFunctional = LinearFunctional::zero(2.0).unwrap().into();
        let probes = vec![sv(&[(0, 0.05)]), sv(&[(7, -0.03)])];
        let report = run_convergence(&f, &probes, &WitnessSchedule::default(), 1e-3);
        assert!(report.passed);
        assert!(*report.sup_error_per_step.last().unwrap() <= 1e-6);
    }

    #[test]
    fn convergence_every_family_at_default_schedule() {
        // Bounded families are eventually exact; the linear family needs the
        // tolerance matched to probe size (remainder ≈ ‖x‖²/2m).
        let probes = sample(&ProbeSpec::default(), DEFAULT_SEED);
        for f in [
            MetricFunctional::internal(1.5, sv(&[(0, 2.0)])).unwrap(),
            LpFiniteFunctional::new(3.0, sv(&[(1, -1.0)]), 4.0)
                .unwrap()
                .into(),
            L1LimitFunctional::new(CoordMode::Anchor(1.0), [(0, CoordMode::Sign(Sign::Minus))])
                .into(),
        ] {
            let report = run_convergence(&f, &probes, &WitnessSchedule::default(), 1e-6);
            assert!(report.passed, "family {f:?} failed");
        }
        let tiny = vec![sv(&[(0, 0.05)])];
        let linear: MetricFunctional = LinearFunctional::new(2.0, sv(&[(0, 0.6)])).unwrap().into();
        assert!(run_convergence(&linear, &tiny, &WitnessSchedule::default(), 1e-6).passed);
    }

    #[test]
    fn convergence_internal_is_a_trivially_passing_noop() {
        let f = MetricFunctional::internal(2.0, sv(&[(0, 1.0)])).unwrap();
        let probes = sample(&ProbeSpec::default(), DEFAULT_SEED);
        let report = run_convergence(&f, &probes, &WitnessSchedule::default(), 1e-12);
        assert!(report.passed);
        assert!(report.sup_error_per_step.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn report_csv_shape() {
        let f: MetricFunctional = LinearFunctional::zero(2.0).unwrap().into();
        let schedule = WitnessSchedule::new(vec![16, 32]).unwrap();
        let report = run_convergence(&f, &[sv(&[(0, 0.05)])], &schedule, 1e-1);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "step,sup_error");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("16,"));
    }

    #[test]
    fn lipschitz_equality_case_for_internal() {
        // Ratio 1 is attained at x′ = y, x = y + t·e_j.
        let y = sv(&[(0, 2.0), (3, -1.0)]);
        let x = sv(&[(0, 2.0), (3, -1.0), (7, 4.0)]);
        let h = |v: &SparseVector| evaluate_internal(1.0, &y, v);
        assert_eq!((h(&x) - h(&y)).abs(), p_norm(&x.sub(&y), 1.0));
    }

    #[test]
    fn lipschitz_bounds() {
        for f in battery(FamilyFilter::All, DEFAULT_SEED).iter().step_by(9) {
            assert!(lipschitz_check(f, 500, DEFAULT_SEED) <= 1.0 + 1e-9);
        }
        // A linear functional with dual norm 1/2 is 1/2-Lipschitz.
        let f: MetricFunctional = LinearFunctional::new(2.0, sv(&[(5, 0.5)])).unwrap().into();
        assert!(lipschitz_check(&f, 1000, DEFAULT_SEED) <= 0.5 + 1e-12);
    }

    #[test]
    fn radon_riesz_examples() {
        let schedule = WitnessSchedule::default();
        for dev in radon_riesz_check(&SparseVector::new(), 1.0, &schedule).unwrap() {
            assert_eq!(dev, 0.0);
        }
        let z = sv(&[(0, 0.6), (1, 0.8)]);
        for dev in radon_riesz_check(&z, 1.0, &schedule).unwrap() {
            assert_eq!(dev, 0.0); // c = ‖z‖₂: the witness is z itself
        }
        for dev in radon_riesz_check(&sv(&[(0, 1.0)]), 2.0f64.sqrt(), &schedule).unwrap() {
            assert!(dev.abs() <= 1e-12);
        }
    }

    #[test]
    fn base_point_identity_examples() {
        let probes = sample(&ProbeSpec::default(), DEFAULT_SEED);
        let y = sv(&[(0, 3.0), (2, -1.5)]);

        assert_eq!(
            base_point_identity_check(2.0, &y, &SparseVector::new(), &probes),
            0.0
        );

        // Disjoint unit supports at p = 1 cancel by hand.
        let dev = base_point_identity_check(
            1.0,
            &SparseVector::basis(0),
            &SparseVector::basis(1),
            &[SparseVector::basis(2)],
        );
        assert_eq!(dev, 0.0);

        let dev = base_point_identity_check(2.0, &y, &sv(&[(1, 2.0), (5, -0.5)]), &probes);
        assert!(dev <= 1e-12);
    }

    #[test]
    fn infimum_bracket_examples() {
        let f: MetricFunctional = LpFiniteFunctional::new(2.0, SparseVector::new(), 1.0)
            .unwrap()
            .into();
        assert_eq!(infimum_bracket(&f, 4), 0.0);

        let linear: MetricFunctional = LinearFunctional::new(2.0, sv(&[(0, 1.0)])).unwrap().into();
        assert!(infimum_bracket(&linear, 4) <= -1e3);

        let internal = MetricFunctional::internal(1.0, sv(&[(0, 2.0)])).unwrap();
        assert_eq!(infimum_bracket(&internal, 4), -2.0);
    }

    #[test]
    fn infimum_bracket_descends_for_tail_anchors() {
        // Sign-free, nonzero tail: descent only along anchor prefixes.
        let f: MetricFunctional =
            L1LimitFunctional::new(CoordMode::Anchor(0.25), [(0, CoordMode::Anchor(-1.0))]).into();
        assert_eq!(f.classify(), Classification::AtInfinity);
        assert!(infimum_bracket(&f, 4) <= -1e3);
    }

    #[test]
    fn bracket_agrees_with_classification_on_a_battery_slice() {
        for f in battery(FamilyFilter::All, DEFAULT_SEED).iter().step_by(7) {
            let bracket = infimum_bracket(f, 4);
            match f.classify() {
                Classification::Finite => {
                    assert!(bracket >= f.analytic_infimum() - 1e-9, "{f:?}");
                }
                Classification::AtInfinity => {
                    assert!(bracket <= -1e3, "{f:?} bracket {bracket}");
                }
            }
        }
    }

    #[test]
    fn slope_fit_recovers_a_power_law() {
        let xs: Vec<f64> = (4..=12).map(|e| (1u64 << e) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 / x).collect();
        assert!((log_log_slope(&xs, &ys) + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn probes_index_type_roundtrip() {
        // Index is the key type of every serialized map.
        let j: Index = 7u64.into();
        assert_eq!(j.to_string(), "7");
    }
}
