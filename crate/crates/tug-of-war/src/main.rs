use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tug_of_war::commands::{self, CommandOutcome, EXIT_CONFIG};
use tug_of_war::config::ExperimentConfig;
use tug_of_war::error::Error;

/// Game-value experiments for the mixed-boundary infinity-Laplacian
/// problem: fixed-point solves, closed-form 1-D oracles, Monte Carlo
/// simulation, analysis checks, and eps-convergence studies.
#[derive(Parser)]
#[command(name = "tow", version, about)]
struct Cli {
    /// Experiment configuration file (flat `key = value` text).
    #[arg(long, global = true, default_value = "experiment.cfg")]
    config: PathBuf,

    /// Output directory for CSV and report files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Overrides `sim.seed` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Caps the worker thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the fixed-point equation and export the value function.
    Solve,
    /// Export the closed-form 1-D cell values.
    Oracle1d,
    /// Monte Carlo estimates of expected payoffs per start node.
    Simulate,
    /// Run the enabled analysis checks (exit 1 on any failure).
    Analyze,
    /// Solve across an eps list and tabulate convergence diagnostics.
    Study,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not set thread count: {e}");
        }
    }

    let mut cfg = match ExperimentConfig::from_file(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }

    let result = match cli.command {
        Command::Solve => commands::cmd_solve(&cfg, &cli.out),
        Command::Oracle1d => commands::cmd_oracle1d(&cfg, &cli.out),
        Command::Simulate => commands::cmd_simulate(&cfg, &cli.out),
        Command::Analyze => commands::cmd_analyze(&cfg, &cli.out),
        Command::Study => commands::cmd_study(&cfg, &cli.out),
    };

    match result {
        Ok(CommandOutcome {
            exit_code,
            messages,
        }) => {
            for line in messages {
                println!("{line}");
            }
            ExitCode::from(exit_code as u8)
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
