//! Thin CLI over the library: parse the config file, apply flag overrides,
//! dispatch, and map failures to stable exit codes.
//!
//! Exit codes: 0 success, 2 configuration error, 3 parameter search did not
//! accept (or check suite failed), 4 solver/runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use morozov::config::{Experiment, OutputFormat, RunConfig, RunMode};
use morozov::error::Error;

#[derive(Parser, Debug)]
#[command(
    name = "morozov",
    about = "Tikhonov regularization with a widened Morozov discrepancy principle",
    version
)]
struct Cli {
    /// TOML configuration file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// cs | gravity | scalar-oracle
    #[arg(long)]
    experiment: Option<String>,

    /// algorithm1 | upper-bound | sweep | noise-study | rate-study | check
    #[arg(long)]
    mode: Option<String>,

    /// Seed override for the selected experiment.
    #[arg(long)]
    seed: Option<u64>,

    /// SNR (dB) override for the CS experiment.
    #[arg(long)]
    snr_db: Option<f64>,

    /// α grid for sweep mode: lin:a:b:n | log:a:b:n | list:v1,v2,…
    #[arg(long)]
    alpha_grid: Option<String>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv | json | both
    #[arg(long)]
    format: Option<String>,

    /// Worker threads for studies (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn build_config(cli: &Cli) -> morozov::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => morozov::parse_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(e) = &cli.experiment {
        cfg.experiment = Experiment::parse(e)?;
    }
    if let Some(m) = &cli.mode {
        cfg.mode = RunMode::parse(m)?;
    }
    if let Some(f) = &cli.format {
        cfg.format = OutputFormat::parse(f)?;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.snr_db.is_some() {
        cfg.snr_db = cli.snr_db;
    }
    if cli.alpha_grid.is_some() {
        cfg.alpha_grid = cli.alpha_grid.clone();
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    cfg.resolve()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    match morozov::run(&cfg) {
        Ok(manifest) => {
            if let Some(outcome) = &manifest.summary.outcome {
                println!(
                    "outcome: {outcome}  alpha: {}  discrepancy: {}  delta: {}",
                    manifest.summary.alpha.unwrap_or(f64::NAN),
                    manifest.summary.discrepancy.unwrap_or(f64::NAN),
                    manifest.summary.delta.unwrap_or(f64::NAN),
                );
                if outcome != "accepted" {
                    eprintln!("parameter search did not accept ({outcome})");
                    return ExitCode::from(3);
                }
            }
            if manifest.summary.checks_passed == Some(false) {
                eprintln!("check suite failed");
                return ExitCode::from(3);
            }
            println!("wrote {} file(s) to {}", manifest.files.len(), cfg.out.display());
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config(_)) | Err(e @ Error::InvalidInput(_)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("run failed: {e}");
            ExitCode::from(4)
        }
    }
}
