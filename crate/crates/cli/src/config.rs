//! Experiment configuration: the JSON schema behind `horolp converge`.

use serde::{Deserialize, Serialize};

use horolp::probes::{ProbeSpec, DEFAULT_SEED};
use horolp::witnesses::WitnessSchedule;
use horolp::{Error, MetricFunctional, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_amplitude() -> f64 {
    10.0
}

/// One convergence experiment: a functional, a seeded probe family, a
/// witness schedule, and a pass tolerance on the final sup error.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub functional: MetricFunctional,
    pub probe_count: usize,
    /// Probe supports are subsets of {0, …, probe_support_max}.
    pub probe_support_max: u64,
    /// Probe magnitudes are uniform in [−probe_amplitude, probe_amplitude].
    #[serde(default = "default_amplitude")]
    pub probe_amplitude: f64,
    pub schedule: WitnessSchedule,
    pub tolerance: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_format: OutputFormat,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.probe_count < 1 {
            return Err(Error::InvalidConfig("probe_count must be >= 1".into()));
        }
        if self.tolerance <= 0.0 || !self.tolerance.is_finite() {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if self.probe_amplitude <= 0.0 || !self.probe_amplitude.is_finite() {
            return Err(Error::InvalidConfig(
                "probe_amplitude must be positive".into(),
            ));
        }
        self.schedule.validate()?;
        self.functional.validate()
    }

    pub fn probe_spec(&self) -> ProbeSpec {
        ProbeSpec {
            count: self.probe_count,
            max_index: self.probe_support_max,
            amplitude: self.probe_amplitude,
            ..ProbeSpec::default()
        }
    }
}
