use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dirac_lab::{run, Command, LabError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "dirac-lab", version, about = "Partial-wave Dirac experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Flat TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random test states (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps (overrides `threads`).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override a configuration key, e.g. `--set cells=512`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Sub {
    /// Algebra, basis, radial and nonlinearity checks.
    Verify,
    /// Evolve one data set and write the trajectory.
    Evolve,
    /// Nonlinear runs over `amplitudes`.
    SweepAmplitude,
    /// Estimate ratios over the dilation factors `lambdas`.
    SweepScaling,
    /// Convergence order under refinement of `h` and `dt`.
    Converge,
    /// Radial flow against the 3D spectral solver.
    CompareOracle,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Verify => Command::Verify,
            Sub::Evolve => Command::Evolve,
            Sub::SweepAmplitude => Command::SweepAmplitude,
            Sub::SweepScaling => Command::SweepScaling,
            Sub::Converge => Command::Converge,
            Sub::CompareOracle => Command::CompareOracle,
        }
    }
}

fn fail(e: &LabError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&LabError::Config(e.to_string().trim().to_string())),
    };
    let mut cfg = match RunConfig::load(cli.config.as_deref(), &cli.overrides) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    match run(cli.command.into(), &cfg) {
        Ok(report) => {
            print!("{}", report.summary());
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                let failed: Vec<String> = report
                    .failures()
                    .iter()
                    .map(|c| c.name.clone())
                    .chain(report.stage_errors.iter().map(|e| e.stage.clone()))
                    .collect();
                fail(&LabError::CheckFailed(failed.join(", ")))
            }
        }
        Err(e) => fail(&e),
    }
}
