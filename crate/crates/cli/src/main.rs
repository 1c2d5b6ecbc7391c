use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qeom_core::io::{load_run_config, write_results, RunConfig};
use qeom_core::pipeline::{observable_census, run_pipeline, sample_ground_state};
use qeom_core::Error;

/// Failed-repetition fraction above which `run` exits with status 3.
const UNSTABLE_FRACTION: f64 = 0.5;

#[derive(Parser)]
#[command(name = "qeom", version, about = "Thermal states from qEOM with simulated IC-POVM shots")]
struct Cli {
    /// Overrides the metric eigenvalue threshold of the generalized eigenproblem.
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep β and shot counts and write the result tables.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Count excitation operators and distinct Pauli strings without sampling.
    Census {
        #[arg(long)]
        config: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Sample a ground-state outcome record and write it as CSV.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Invalid(Error),
    Other(Error),
    Unstable(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ValidationFailed { .. } => Failure::Invalid(e),
            other => Failure::Other(other),
        }
    }
}

fn load(path: &Path, eta: Option<f64>) -> Result<RunConfig, Failure> {
    let mut cfg = load_run_config(path)?;
    if let Some(eta) = eta {
        cfg.eta = eta;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config } => {
            let cfg = load(&config, cli.eta)?;
            let table = run_pipeline(&cfg)?;
            write_results(&table, &cfg.output_path)?;
            println!("wrote {}", cfg.output_path.display());
            let mut unstable = Vec::new();
            for &shots in &cfg.shot_counts {
                let frac = table.failed_fraction(shots);
                println!("shots {shots}: failed fraction {frac:.3}");
                if frac > UNSTABLE_FRACTION {
                    unstable.push(format!("{shots} ({frac:.3})"));
                }
            }
            if !unstable.is_empty() {
                return Err(Failure::Unstable(unstable.join(", ")));
            }
        }
        Command::Census { config, json } => {
            let cfg = load(&config, cli.eta)?;
            let report = observable_census(&cfg)?;
            if json {
                let text = serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::Serialization(e.to_string()))?;
                println!("{text}");
            } else {
                print!("{report}");
            }
        }
        Command::Sample { config, out } => {
            let cfg = load(&config, cli.eta)?;
            let record = sample_ground_state(&cfg)?;
            record.write_csv(&out)?;
            println!("wrote {} shots to {}", record.shots(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Unstable(which)) => {
            eprintln!("error: more than half of the repetitions failed at shot count {which}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
