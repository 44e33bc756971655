//! `ristw`: evaluate outage, rate, throughput, and efficiency sweeps for
//! the two-way surface-assisted link study and emit plot-ready tables.
//!
//! Exit codes: 0 on success, 1 for invocation/configuration problems,
//! 2 for runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};

use ristw_cli::config::{self, SweepSpec};
use ristw_cli::emit;
use ristw_cli::presets;
use ristw_cli::runner;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Sweep runner for a two-way surface-assisted link: computes closed-form
/// and simulated outage, ergodic rate, throughput, and energy efficiency
/// over power, allocation, or element-count grids.
#[derive(Parser)]
#[command(name = "ristw", version)]
struct Cli {
    /// TOML sweep description (mutually exclusive with --preset)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Canned figure sweep, e.g. fig2 (run with an unknown id to list all)
    #[arg(long, value_name = "ID")]
    preset: Option<String>,

    /// Write the table here instead of stdout
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output encoding
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Override the trial count for simulated rows
    #[arg(long)]
    trials: Option<u64>,

    /// Override the random seed
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads; 0 uses every core (the output is identical either way)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn build_spec(cli: &Cli) -> Result<SweepSpec, Failure> {
    let mut spec = match (&cli.config, &cli.preset) {
        (Some(_), Some(_)) => {
            return Err(fail(1, "pass either --config or --preset, not both"));
        }
        (Some(path), None) => {
            config::load_config(path).map_err(|e| fail(1, e.to_string()))?
        }
        (None, Some(id)) => presets::by_id(id).ok_or_else(|| {
            fail(
                1,
                format!("unknown preset {id:?} (available: {})", presets::ids().join(", ")),
            )
        })?,
        (None, None) => SweepSpec::default(),
    };
    if let Some(trials) = cli.trials {
        spec.trials = trials;
    }
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    // overrides can invalidate a previously valid spec (e.g. --trials 0)
    config::validate(&spec).map_err(|e| fail(1, e.to_string()))?;
    Ok(spec)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let spec = build_spec(cli)?;

    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| fail(2, format!("cannot size the worker pool: {e}")))?;
    }

    let rows = runner::run_sweep(&spec).map_err(|e| fail(2, e.to_string()))?;
    let text = match cli.format {
        Format::Csv => emit::to_csv(&rows),
        Format::Json => emit::to_json(&rows),
    };

    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| fail(2, format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
