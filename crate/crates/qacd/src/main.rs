use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qacd::commands::{
    calibration_report, forecast, format_forecast, format_frame_potential, frame_potential, histogram, scaling,
    write_scaling,
};
use qacd::config::ExperimentConfig;
use qacd::verify::verify_examples;
use qacd::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "qacd", version, about = "Average-case distances between quantum states, measurements and channels")]
struct Cli {
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the closed-form examples against dense evaluation.
    VerifyExamples,
    /// Distances versus qubit count; writes <scenario>.csv and .json.
    Scaling {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-ensemble 50-bin TVD histograms.
    Histogram {
        #[arg(long)]
        config: PathBuf,
        /// Output file; defaults to the config's `out`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo frame potential E|tr(U^dag V)|^(2k).
    FramePotential {
        /// haar, brickwork, qaoa or vqe
        #[arg(long)]
        ensemble: String,
        #[arg(long)]
        n: usize,
        /// Layers (depth for brickwork); defaults to floor(1.5 N).
        #[arg(long)]
        layers: Option<usize>,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Readout forecast for N qubits with average success q_av.
    Forecast {
        #[arg(long)]
        qav: f64,
        #[arg(long)]
        n: usize,
    },
    /// Load and validate a calibration file.
    Calibration {
        #[arg(long)]
        file: PathBuf,
        /// Print the validation summary (loading alone already validates).
        #[arg(long)]
        validate: bool,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::VerifyExamples => {
            let rows = verify_examples()?;
            for r in &rows {
                println!("{r}");
            }
            let failed = rows.iter().filter(|r| !r.passed()).count();
            println!("{} checks, {} failed", rows.len(), failed);
            if failed > 0 {
                for r in rows.iter().filter(|r| !r.passed()) {
                    eprintln!("failed: {}", r.name.trim());
                }
                return Err(CliError::Failed(failed));
            }
        }
        Command::Scaling { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = out
                .or_else(|| cfg.out.clone())
                .ok_or_else(|| CliError::Config("no output directory: pass --out or set \"out\"".into()))?;
            let result = scaling(&cfg, cli.threads)?;
            let (csv, json) = write_scaling(&result, &cfg, &dir)?;
            println!("wrote {} and {}", csv.display(), json.display());
        }
        Command::Histogram { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let text = histogram(&cfg, cli.threads)?;
            match out.or_else(|| cfg.out.clone()) {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
                    println!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
        }
        Command::FramePotential {
            ensemble,
            n,
            layers,
            k,
            pairs,
            seed,
        } => {
            let layers = layers.unwrap_or_else(|| qacd_core::ensembles::default_layers(n));
            let (ens, est) = frame_potential(&ensemble, n, layers, k, pairs, seed, cli.threads)?;
            print!("{}", format_frame_potential(&ens, &est, seed));
        }
        Command::Forecast { qav, n } => print!("{}", format_forecast(&forecast(qav, n)?)),
        Command::Calibration { file, validate } => {
            let report = calibration_report(&file)?;
            if validate {
                print!("{report}");
            }
            println!("{}: valid", file.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
