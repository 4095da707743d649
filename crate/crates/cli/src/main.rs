//! `structdmd`: train, test and inspect structured DMD models.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use structdmd::harness::{self, Conversion, ExperimentConfig};
use structdmd::Error;

#[derive(Debug, Parser)]
#[command(name = "structdmd", version, about = "Structured dynamic mode decomposition experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct ConfigArgs {
    /// Experiment config file (flat `key = value` lines).
    #[arg(short, long)]
    config: PathBuf,
    /// Override a config key, e.g. `--set reduce=tol:1e-5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Burgers on the full grid (n0 = 40, order-1640 lift). Takes minutes and ~1 GB.
    #[arg(long)]
    full_scale: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Domain {
    Continuous,
    Discrete,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate, fit, reduce and validate on the training input.
    Train(ConfigArgs),
    /// Compare a saved model with the reference system under the test input.
    Test {
        #[command(flatten)]
        args: ConfigArgs,
        /// Model file written by `train`.
        #[arg(short, long)]
        model: PathBuf,
    },
    /// Normalized singular values of the regressor and target matrices.
    SvdReport(ConfigArgs),
    /// Euler conversion between discrete and continuous model files.
    Convert {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Target time domain.
        #[arg(long, value_enum)]
        to: Domain,
        /// Step size, required for `--to discrete`.
        #[arg(long)]
        dt: Option<f64>,
    },
}

fn load(args: &ConfigArgs) -> Result<ExperimentConfig<f64>, Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if args.full_scale {
        cfg.apply_overrides(&["n0=40", "save_fit_data=false"])?;
    }
    cfg.apply_overrides(&args.overrides)?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Train(args) => {
            let cfg = load(&args)?;
            let (outcome, arts) = harness::run_train(&cfg)?;
            print!("{}", outcome.report.to_text());
            println!("model = {}", arts.model.display());
        }
        Command::Test { args, model } => {
            let cfg = load(&args)?;
            let (report, csv) = harness::run_test(&model, &cfg)?;
            println!("steps = {}", report.steps);
            println!("relative_error = {:.6e}", report.relative_error);
            if let Some(k) = report.diverged_at {
                println!("diverged_at = {k}");
            }
            println!("outputs = {}", csv.display());
        }
        Command::SvdReport(args) => {
            let cfg = load(&args)?;
            let (report, csv) = harness::run_svd_report(&cfg)?;
            println!("p = {}", report.p);
            println!("r = {}", report.r);
            println!("svd = {}", csv.display());
        }
        Command::Convert { input, output, to, dt } => {
            let conversion = match (to, dt) {
                (Domain::Continuous, _) => Conversion::ToContinuous,
                (Domain::Discrete, Some(dt)) => Conversion::ToDiscrete { dt },
                (Domain::Discrete, None) => {
                    return Err(Error::Config("--to discrete needs --dt".into()));
                }
            };
            harness::convert_model(&input, &output, conversion)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
