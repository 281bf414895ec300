//! `qprob`: bounds, interference and box analyses with reproducible reports.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{Failure, Inputs};

#[derive(Debug, Parser)]
#[command(name = "qprob", version, about = "Probability bounds for quantum logics, Hilbert models and no-signaling boxes")]
struct Cli {
    /// Also write the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical and logic-level maxima of a weighted event family.
    Bounds {
        /// `pentagon` or a logic file (JSON with `atoms` and `blocks`).
        logic: String,
        /// Comma-separated rational weights, e.g. `1,1,0,0,0`.
        #[arg(long)]
        weights: Option<String>,
        /// Comma-separated atom names. Defaults to e1..e5 on the pentagon, all atoms otherwise.
        #[arg(long)]
        events: Option<String>,
    },
    /// Random search over quantum realizations of the pentagon.
    Quantum {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Third-order interference and T-additivity over a random corpus.
    Interference {
        /// Fixed dimension; without it instances cycle through 3, 4, 5, 6.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// No-signaling check, CHSH and the pentagon embedding of a box.
    Box {
        /// `pr1`..`pr8`, `uniform` or a box file.
        source: String,
        #[arg(long)]
        pentagon: bool,
    },
    /// Classical, quantum and algebraic CHSH values.
    ChshBounds,
}

/// Arguments after the program name, without `--out` and its value.
fn echoed_args() -> Vec<String> {
    let mut out = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--out" {
            args.next();
        } else if !a.starts_with("--out=") {
            out.push(a);
        }
    }
    out
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let inputs = Inputs::new(&echoed_args());
    let report = match &cli.command {
        Command::Bounds { logic, weights, events } => {
            commands::cmd_bounds(inputs, logic, weights.as_deref(), events.as_deref())?
        }
        Command::Quantum { dim, trials, seed } => commands::cmd_quantum(inputs, *dim, *trials, *seed)?,
        Command::Interference { dim, samples, seed } => {
            commands::cmd_interference(inputs, *dim, *samples, *seed)?
        }
        Command::Box { source, pentagon } => commands::cmd_box(inputs, source, *pentagon)?,
        Command::ChshBounds => commands::cmd_chsh_bounds(inputs)?,
    };
    Ok(report.render())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    let elapsed = start.elapsed();
    match result {
        Ok(text) => {
            print!("{text}");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            eprintln!("wall-time: {:.3} s", elapsed.as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
