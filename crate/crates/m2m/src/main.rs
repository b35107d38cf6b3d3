use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use m2m::config::{DataConfig, ExperimentConfig};
use m2m::{harness, Error};

#[derive(Parser)]
#[command(name = "m2m", version, about = "Imbalanced-classification experiments with M2m over-sampling")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate every strategy for every seed.
    Run { config: PathBuf },
    /// Grid-search lambda, beta and gamma on the validation split.
    Sweep { config: PathBuf },
    /// Re-render summary tables from a finished run directory.
    Report { dir: PathBuf },
    /// Export train/val/test CSV files.
    GenData { spec: PathBuf },
}

fn execute(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = harness::run(&cfg)?;
            print!("{}", out.table);
            eprintln!("results written to {}", cfg.output_dir.display());
        }
        Command::Sweep { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = harness::sweep(&cfg)?;
            println!("| lambda | beta | gamma | val bACC |\n|---|---|---|---|");
            for c in &out.candidates {
                println!(
                    "| {} | {} | {} | {:.2} |",
                    c.lambda,
                    c.beta,
                    c.gamma,
                    100.0 * c.mean_val_bacc
                );
            }
            let b = &out.best;
            println!(
                "best: lambda = {}, beta = {}, gamma = {} ({:.2})",
                b.lambda,
                b.beta,
                b.gamma,
                100.0 * b.mean_val_bacc
            );
        }
        Command::Report { dir } => print!("{}", harness::report(&dir)?.table),
        Command::GenData { spec } => {
            let cfg = DataConfig::load(&spec)?;
            let prepared = harness::prepare(&cfg.dataset, &cfg.split, cfg.imbalance.as_ref(), cfg.seed)?;
            for path in harness::export(&prepared, &cfg.output_dir)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::to_string(&e.record()).unwrap_or_else(|_| e.to_string());
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
