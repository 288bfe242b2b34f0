use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hightuner::harness::{self, output, sweep, ExperimentConfig, RunTrace};
use hightuner::Error;

#[derive(Parser)]
#[command(name = "hightuner", version, about = "High-order tuner experiments: run, reproduce, sweep, certify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON experiment config and write its trace CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the config's `output`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in preset.
    Repro {
        #[arg(value_parser = ["fig1", "fig2", "fig3", "example1"])]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Switch time for example1.
        #[arg(long)]
        tau: Option<usize>,
    },
    /// Tabulate the stability coefficients over a gamma grid.
    Sweep {
        #[arg(long)]
        gamma_min: f64,
        #[arg(long)]
        gamma_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the per-step certificate summary of a config.
    Certify {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_VIOLATION: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::UnknownPreset(_)
        | Error::InvalidSchedule(_)
        | Error::InvalidHyperParameter(_)
        | Error::InvalidAnalysisParameter(_)
        | Error::InvalidObjective { .. }
        | Error::Shape { .. } => EXIT_CONFIG,
        Error::Io { .. } | Error::Csv(_) => EXIT_IO,
        _ => EXIT_FAILURE,
    }
}

fn emit(trace: &RunTrace, out: Option<&Path>) -> hightuner::Result<()> {
    match out {
        Some(path) => {
            for p in output::save_trace(path, trace)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            output::write_trace(std::io::stdout().lock(), trace)?;
            if !trace.regret.is_empty() {
                eprintln!("regret table skipped: pass --out to write it alongside the trace");
            }
        }
    }
    Ok(())
}

fn report(trace: &RunTrace) -> u8 {
    for name in trace.optimizer_names() {
        if let Some(r) = trace.rows_for(name).find(|r| r.diverged) {
            eprintln!("{name}: diverged at t={}", r.t);
        }
    }
    for v in &trace.violations {
        eprintln!(
            "monitor violation: {} t={} delta={:e} bound={:e} tol={:e}",
            v.optimizer, v.t, v.delta, v.bound, v.tol
        );
    }
    if trace.violations.is_empty() {
        0
    } else {
        EXIT_VIOLATION
    }
}

fn execute(cli: Cli) -> hightuner::Result<u8> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let trace = harness::run_experiment(&cfg)?;
            emit(&trace, out.as_deref().or(cfg.output.as_deref()))?;
            Ok(report(&trace))
        }
        Command::Repro { name, out, tau } => {
            let trace = harness::repro(&name, tau)?;
            emit(&trace, out.as_deref())?;
            if let (Some(path), "fig1") = (out.as_deref(), name.as_str()) {
                let rows = harness::sweep_gamma(1.001, 4.0, sweep::steps_for_spacing(1.001, 4.0, 1e-3))?;
                let sp = output::companion_path(path, "sweep");
                output::save_sweep(&sp, &rows)?;
                eprintln!("wrote {}", sp.display());
            }
            Ok(report(&trace))
        }
        Command::Sweep {
            gamma_min,
            gamma_max,
            steps,
            out,
        } => {
            let rows = harness::sweep_gamma(gamma_min, gamma_max, steps)?;
            match out {
                Some(path) => output::save_sweep(&path, &rows)?,
                None => output::write_sweep(std::io::stdout().lock(), &rows)?,
            }
            Ok(0)
        }
        Command::Certify { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            for span in harness::certify(&cfg)? {
                println!("{}", span.describe());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
