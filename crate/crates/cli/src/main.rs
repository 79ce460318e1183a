use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use septensor_cli::experiments::{self, Experiment};
use septensor_cli::{CliError, Config};

/// Separated-representation experiments.
#[derive(Debug, Parser)]
#[command(name = "septensor", version)]
struct Args {
    /// spectra, redundant, ortho-limit, schulz-poisson, scaling or reduce
    experiment: Experiment,
    /// Flat `key = value` file; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout when absent. A JSON snapshot, when produced,
    /// goes next to it with a `.json` extension.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; all available cores when absent.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("septensor: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot set thread count: {e}")))?;
    }
    let mut cfg = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = args.seed {
        cfg.set("seed", s);
    }
    let out = experiments::run(args.experiment, &cfg)?;
    let csv = out.table.to_string();
    match &args.out {
        Some(path) => {
            std::fs::write(path, csv)?;
            if let Some(json) = out.snapshot {
                std::fs::write(path.with_extension("json"), json)?;
            }
        }
        None => {
            print!("{csv}");
            if out.snapshot.is_some() {
                eprintln!("septensor: snapshot skipped (no --out path)");
            }
        }
    }
    Ok(())
}
