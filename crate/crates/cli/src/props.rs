//! Property-suite driver for `horolp props`: runs the invariant checks over
//! a seeded battery and prints one row per suite.

use horolp::functionals::{Classification, MetricFunctional};
use horolp::lab;
use horolp::probes::{self, FamilyFilter, ProbeSpec};
use horolp::witnesses::{linear_norming_pair, WitnessSchedule};
use horolp::{dual_pairing, p_norm, SparseVector};

pub struct SuiteRow {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl SuiteRow {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

fn battery_for(families: &[FamilyFilter], seed: u64) -> Vec<MetricFunctional> {
    if families.contains(&FamilyFilter::All) {
        return probes::battery(FamilyFilter::All, seed);
    }
    families
        .iter()
        .flat_map(|&f| probes::battery(f, seed))
        .collect()
}

pub fn run_props(families: &[FamilyFilter], seed: u64) -> Vec<SuiteRow> {
    let battery = battery_for(families, seed);
    let probe_set = probes::sample(&ProbeSpec::default(), seed);
    let schedule = WitnessSchedule::default();
    let mut rows = Vec::new();

    // Every closed form vanishes at the origin, with no rounding at all.
    let origin = SparseVector::new();
    let origin_dev = battery
        .iter()
        .map(|f| f.evaluate(&origin).abs())
        .fold(0.0, f64::max);
    rows.push(SuiteRow {
        name: "h(0) = 0 (exact)",
        deviation: origin_dev,
        tolerance: 0.0,
    });

    let lipschitz = battery
        .iter()
        .step_by(7)
        .map(|f| lab::lipschitz_check(f, 500, seed))
        .fold(0.0, f64::max);
    rows.push(SuiteRow {
        name: "1-Lipschitz max ratio",
        deviation: lipschitz,
        tolerance: 1.0 + 1e-9,
    });

    // classify, analytic_infimum, and the probe bracket must tell one story.
    let mut coherence_violations = 0u32;
    for f in &battery {
        let finite = f.classify() == Classification::Finite;
        if finite != (f.analytic_infimum() > f64::NEG_INFINITY) {
            coherence_violations += 1;
            continue;
        }
        let bracket = lab::infimum_bracket(f, 4);
        let ok = if finite {
            bracket >= f.analytic_infimum() - 1e-9
        } else {
            bracket <= -1e3
        };
        if !ok {
            coherence_violations += 1;
        }
    }
    rows.push(SuiteRow {
        name: "classification coherence (violations)",
        deviation: coherence_violations as f64,
        tolerance: 0.0,
    });

    let canonicalize_dev = battery
        .iter()
        .flat_map(|f| {
            let canonical = f.clone().canonicalize();
            probe_set
                .iter()
                .map(move |x| (f.evaluate(x) - canonical.evaluate(x)).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    rows.push(SuiteRow {
        name: "canonicalize preserves evaluation",
        deviation: canonicalize_dev,
        tolerance: 1e-12,
    });

    let centers = probes::sample(
        &ProbeSpec {
            count: 50,
            ..ProbeSpec::default()
        },
        seed + 3,
    );
    let radon_dev = centers
        .iter()
        .enumerate()
        .flat_map(|(i, z)| {
            let c = p_norm(z, 2.0) + (i % 5) as f64;
            lab::radon_riesz_check(z, c, &schedule).expect("c >= norm by construction")
        })
        .map(f64::abs)
        .fold(0.0, f64::max);
    rows.push(SuiteRow {
        name: "Radon-Riesz displacement",
        deviation: radon_dev,
        tolerance: 1e-9,
    });

    let ys = probes::sample(
        &ProbeSpec {
            count: 200,
            ..ProbeSpec::default()
        },
        seed + 5,
    );
    let bs = probes::sample(
        &ProbeSpec {
            count: 200,
            ..ProbeSpec::default()
        },
        seed + 6,
    );
    let base_dev = (0..200)
        .map(|i| {
            let p = [1.0, 1.5, 2.0, 3.0][i % 4];
            lab::base_point_identity_check(p, &ys[i], &bs[i], &probe_set)
        })
        .fold(0.0, f64::max);
    rows.push(SuiteRow {
        name: "base-point identity",
        deviation: base_dev,
        tolerance: 1e-12,
    });

    // The ℓ1 dichotomy: any sign coordinate carries an exact descent ray.
    let mut sign_ray_dev = 0.0f64;
    for f in &battery {
        if let MetricFunctional::L1Limit(g) = f {
            if let Some((j0, eps)) = g.first_sign_coordinate() {
                for t in [1.0, 10.0, 100.0, 1000.0] {
                    let x = SparseVector::from_entries([(j0.0, -t * eps.value())]);
                    sign_ray_dev = sign_ray_dev.max((g.evaluate(&x) + t).abs());
                }
            }
        }
    }
    rows.push(SuiteRow {
        name: "l1 sign-ray dichotomy (exact)",
        deviation: sign_ray_dev,
        tolerance: 0.0,
    });

    let mut norming_dev = 0.0f64;
    for f in &battery {
        if let MetricFunctional::Linear(g) = f {
            for m in [16, 256, 4096] {
                let (mu_m, z_m) = linear_norming_pair(g, m);
                norming_dev = norming_dev
                    .max((p_norm(&z_m, g.p()) - 1.0).abs())
                    .max((dual_pairing(&mu_m, &z_m) - 1.0).abs());
            }
        }
    }
    rows.push(SuiteRow {
        name: "duality norming identities",
        deviation: norming_dev,
        tolerance: 1e-12,
    });

    // Bounded-net families converge exactly once fresh indices clear probes.
    let bounded_dev = battery
        .iter()
        .filter(|f| !matches!(f, MetricFunctional::Linear(_)))
        .step_by(5)
        .map(|f| {
            *lab::run_convergence(f, &probe_set, &schedule, 1e-6)
                .sup_error_per_step
                .last()
                .unwrap()
        })
        .fold(0.0, f64::max);
    rows.push(SuiteRow {
        name: "convergence, bounded families",
        deviation: bounded_dev,
        tolerance: 1e-6,
    });

    // Linear-family rate in the Hilbert case: slope of sup error vs m.
    let rate_probes = probes::sample(
        &ProbeSpec {
            max_index: 14,
            amplitude: 2.0,
            ..ProbeSpec::default()
        },
        seed,
    );
    let steps: Vec<f64> = schedule.steps().iter().map(|&s| s as f64).collect();
    let slope_dev = battery
        .iter()
        .filter_map(|f| match f {
            MetricFunctional::Linear(g) if g.p() == 2.0 && !g.mu().is_zero() => Some(g),
            _ => None,
        })
        .step_by(3)
        .map(|g| {
            let f: MetricFunctional = g.clone().into();
            let report = lab::run_convergence(&f, &rate_probes, &schedule, 1e-2);
            let slope = lab::log_log_slope(&steps, &report.sup_error_per_step);
            (slope - (-1.3))
                .min(0.0)
                .abs()
                .max((slope - (-0.7)).max(0.0))
        })
        .fold(0.0, f64::max);
    rows.push(SuiteRow {
        name: "linear rate slope in [-1.3, -0.7]",
        deviation: slope_dev,
        tolerance: 0.0,
    });

    rows
}

pub fn print_table(rows: &[SuiteRow]) {
    println!(
        "{:<40} {:>13} {:>13} {:>8}",
        "suite", "max deviation", "tolerance", "verdict"
    );
    for row in rows {
        let tolerance = if row.tolerance == 0.0 {
            "exact".to_string()
        } else if row.tolerance > 1.0 {
            format!("1 + {:.0e}", row.tolerance - 1.0)
        } else {
            format!("{:.0e}", row.tolerance)
        };
        println!(
            "{:<40} {:>13.3e} {:>13} {:>8}",
            row.name,
            row.deviation,
            tolerance,
            if row.passed() { "PASS" } else { "FAIL" }
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_battery_passes_every_suite() {
        let rows = run_props(&[FamilyFilter::All], probes::DEFAULT_SEED);
        for row in &rows {
            assert!(row.passed(), "{}: deviation {:e}", row.name, row.deviation);
        }
    }

    #[test]
    fn l1_restriction_includes_dichotomy_row() {
        let rows = run_props(&[FamilyFilter::L1Limit], probes::DEFAULT_SEED + 9);
        let dichotomy = rows
            .iter()
            .find(|r| r.name.contains("dichotomy"))
            .expect("dichotomy row present");
        assert!(dichotomy.passed());
        assert!(rows.iter().all(|r| r.passed()));
    }
}
