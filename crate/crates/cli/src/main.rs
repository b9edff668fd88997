//! Command-line front end for the ℓp metric-functional lab.
//!
//! Exit codes: 0 pass, 1 suite failure, 2 parse error, 3 invalid functional
//! or configuration.

mod config;
mod example34;
mod props;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ExperimentConfig, OutputFormat};
use horolp::lab::run_convergence;
use horolp::probes::{self, FamilyFilter};

const EXIT_SUITE_FAILURE: u8 = 1;
const EXIT_PARSE_ERROR: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(
    name = "horolp",
    version,
    about = "Metric functionals on lp spaces: convergence experiments, property suites, and the worked-example tabulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence experiment from a JSON config and write its report
    Converge {
        /// Path to the experiment config (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Report destination; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's output format
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        /// Override the config's probe seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the property suites over a seeded functional battery
    Props {
        /// Comma-separated families: all, internal, l1, lp, linear
        #[arg(long, default_value = "all")]
        families: String,
        #[arg(long, default_value_t = probes::DEFAULT_SEED)]
        seed: u64,
    },
    /// Tabulate the worked example's sequences against their limits
    Example34 {
        #[arg(long, default_value_t = 4096)]
        n_max: u64,
        /// Report destination; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long, default_value_t = probes::DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Converge {
            config,
            out,
            format,
            seed,
        } => cmd_converge(&config, out.as_deref(), format, seed),
        Command::Props { families, seed } => cmd_props(&families, seed),
        Command::Example34 {
            n_max,
            out,
            format,
            seed,
        } => cmd_example34(n_max, out.as_deref(), format, seed),
    }
}

fn cmd_converge(
    config_path: &std::path::Path,
    out: Option<&std::path::Path>,
    format: Option<OutputFormat>,
    seed: Option<u64>,
) -> ExitCode {
    let text = match fs::read_to_string(config_path) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: cannot read {}: {err}", config_path.display());
            return ExitCode::from(EXIT_PARSE_ERROR);
        }
    };
    let mut config: ExperimentConfig = match serde_json::from_str(&text) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: malformed config JSON: {err}");
            return ExitCode::from(EXIT_PARSE_ERROR);
        }
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(format) = format {
        config.output_format = format;
    }
    if let Err(err) = config.validate() {
        eprintln!("error: invalid experiment: {err}");
        return ExitCode::from(EXIT_INVALID);
    }

    let probe_set = probes::sample(&config.probe_spec(), config.seed);
    let report = run_convergence(
        &config.functional,
        &probe_set,
        &config.schedule,
        config.tolerance,
    );

    let rendered = match config.output_format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => {
            let mut text =
                serde_json::to_string_pretty(&report).expect("report serialization is infallible");
            text.push('\n');
            text
        }
    };
    if let Err(code) = write_output(out, &rendered) {
        return code;
    }

    let last = report.sup_error_per_step.last().copied().unwrap_or(0.0);
    eprintln!(
        "convergence: final sup error {last:e} at tolerance {:e} -> {}",
        report.tolerance,
        if report.passed { "PASS" } else { "FAIL" }
    );
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SUITE_FAILURE)
    }
}

fn cmd_props(families: &str, seed: u64) -> ExitCode {
    let mut filters = Vec::new();
    for token in families.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token.parse::<FamilyFilter>() {
            Ok(filter) => filters.push(filter),
            Err(err) => {
                eprintln!("error: {err}");
                return ExitCode::from(EXIT_PARSE_ERROR);
            }
        }
    }
    if filters.is_empty() {
        eprintln!("error: no families selected");
        return ExitCode::from(EXIT_PARSE_ERROR);
    }

    let rows = props::run_props(&filters, seed);
    props::print_table(&rows);
    if rows.iter().all(props::SuiteRow::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SUITE_FAILURE)
    }
}

fn cmd_example34(
    n_max: u64,
    out: Option<&std::path::Path>,
    format: OutputFormat,
    seed: u64,
) -> ExitCode {
    if n_max < 1 {
        eprintln!("error: n_max must be >= 1");
        return ExitCode::from(EXIT_INVALID);
    }
    let report = example34::run(n_max, seed);
    let rendered = match format {
        OutputFormat::Csv => example34::to_csv(&report),
        OutputFormat::Json => {
            let mut text =
                serde_json::to_string_pretty(&report).expect("report serialization is infallible");
            text.push('\n');
            text
        }
    };
    if let Err(code) = write_output(out, &rendered) {
        return code;
    }
    eprintln!(
        "example34: norms diverge, internal limit {:?}, at-infinity limit {:?} -> {}",
        report.internal_limit,
        report.infinity_limit,
        if report.contrast_confirmed {
            "PASS"
        } else {
            "FAIL"
        }
    );
    if report.contrast_confirmed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SUITE_FAILURE)
    }
}

fn write_output(out: Option<&std::path::Path>, rendered: &str) -> Result<(), ExitCode> {
    match out {
        Some(path) => fs::write(path, rendered).map_err(|err| {
            eprintln!("error: cannot write {}: {err}", path.display());
            ExitCode::from(EXIT_INVALID)
        }),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}
