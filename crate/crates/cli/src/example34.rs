//! `horolp example34`: tabulates the worked ℓ1 example — two sequences whose
//! norms both diverge, yet one converges to an internal functional and the
//! other to a functional at infinity.

use serde::Serialize;

use horolp::functionals::{Classification, CoordMode, L1LimitFunctional, Sign};
use horolp::probes::{self, ProbeSpec};
use horolp::witnesses::example_34_sequences;
use horolp::{evaluate_internal, p_norm, MetricFunctional, SparseVector};

#[derive(Debug, Clone, Serialize)]
pub struct Example34Row {
    pub n: u64,
    pub norm_y: f64,
    pub norm_y_tilde: f64,
    pub sup_error_y: f64,
    pub sup_error_y_tilde: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Example34Report {
    pub rows: Vec<Example34Row>,
    pub internal_limit: Classification,
    pub infinity_limit: Classification,
    /// Norms diverge on both sequences while the limits split between the
    /// finite and at-infinity parts of the compactification.
    pub contrast_confirmed: bool,
}

pub fn run(n_max: u64, seed: u64) -> Example34Report {
    // Standard probe set: the two hand-checked probes plus seeded dyadic ones.
    let mut probe_set = vec![
        SparseVector::basis(0),
        SparseVector::from_entries([(1, 2.0)]),
    ];
    probe_set.extend(probes::sample(
        &ProbeSpec {
            count: 18,
            ..ProbeSpec::dyadic()
        },
        seed,
    ));

    let z = SparseVector::basis(0);
    let limit_internal = MetricFunctional::internal(1.0, z.clone()).expect("p = 1 is valid");
    let limit_infinity =
        L1LimitFunctional::new(CoordMode::Anchor(1.0), [(0, CoordMode::Sign(Sign::Minus))]);

    let mut ns: Vec<u64> = (0..)
        .map(|e| 1u64 << e)
        .take_while(|&n| n <= n_max)
        .collect();
    if *ns.last().unwrap() != n_max {
        ns.push(n_max);
    }

    let rows: Vec<Example34Row> = ns
        .into_iter()
        .map(|n| {
            let (y_n, y_tilde_n) = example_34_sequences(n);
            let mut sup_y = 0.0f64;
            let mut sup_y_tilde = 0.0f64;
            for x in &probe_set {
                sup_y =
                    sup_y.max((evaluate_internal(1.0, &y_n, x) - limit_internal.evaluate(x)).abs());
                sup_y_tilde = sup_y_tilde.max(
                    (evaluate_internal(1.0, &y_tilde_n, x) - limit_infinity.evaluate(x)).abs(),
                );
            }
            Example34Row {
                n,
                norm_y: p_norm(&y_n, 1.0),
                norm_y_tilde: p_norm(&y_tilde_n, 1.0),
                sup_error_y: sup_y,
                sup_error_y_tilde: sup_y_tilde,
            }
        })
        .collect();

    let infinity_functional: MetricFunctional = limit_infinity.into();
    let norms_diverge = rows.len() >= 2
        && rows.last().unwrap().norm_y > rows[0].norm_y
        && rows.last().unwrap().norm_y_tilde > rows[0].norm_y_tilde;
    let errors_settle = n_max <= 50
        || (rows.last().unwrap().sup_error_y == 0.0
            && rows.last().unwrap().sup_error_y_tilde == 0.0);
    let internal_limit = limit_internal.classify();
    let infinity_limit = infinity_functional.classify();
    let contrast_confirmed = norms_diverge
        && errors_settle
        && internal_limit == Classification::Finite
        && infinity_limit == Classification::AtInfinity;

    Example34Report {
        rows,
        internal_limit,
        infinity_limit,
        contrast_confirmed,
    }
}

pub fn to_csv(report: &Example34Report) -> String {
    let mut out = String::from("n,norm_y,norm_y_tilde,sup_error_y,sup_error_y_tilde\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.n, row.norm_y, row.norm_y_tilde, row.sup_error_y, row.sup_error_y_tilde
        ));
    }
    out
}
