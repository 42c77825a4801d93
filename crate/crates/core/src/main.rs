use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use memesim_core::cli::{cmd_analyze, cmd_fit, cmd_simulate, cmd_sweep, CliError};
use memesim_core::stats::ModelKind;

#[derive(Parser)]
#[command(
    name = "memesim",
    version,
    about = "Meme-sharing contagion simulator and log analytics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Ols,
    Logistic,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its log, series, hit table and plot.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Observed log drawn as a second panel in timeseries.svg.
        #[arg(long)]
        compare_log: Option<PathBuf>,
        /// Bin width in ticks for --compare-log.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        compare_bin: u64,
    },
    /// Run every point of the configured sweep grid and write sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit OLS or logistic regression to a CSV with response column `y`.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-meme hit counts and binned totals of an event log.
    Analyze {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        bin: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Simulate {
            config,
            seed,
            out,
            compare_log,
            compare_bin,
        } => {
            let compare = compare_log.as_deref().map(|p| (p, compare_bin));
            let s = cmd_simulate(&config, seed, out.as_deref(), compare)?;
            println!(
                "seed {}: {} events, {} memes, {} exposures, max hits {}",
                s.seed, s.event_count, s.memes_created, s.final_cumulative_exposures, s.max_hits
            );
        }
        Command::Sweep { config, out } => {
            let rows = cmd_sweep(&config, out.as_deref())?;
            println!("{} runs", rows.len());
        }
        Command::Fit { data, model, out } => {
            let kind = match model {
                Model::Ols => ModelKind::Ols,
                Model::Logistic => ModelKind::Logistic,
            };
            let fit = cmd_fit(&data, kind, &out)?;
            if !fit.converged {
                eprintln!(
                    "warning: fit did not converge after {} iterations",
                    fit.iterations
                );
            }
        }
        Command::Analyze { log, bin, out } => {
            let s = cmd_analyze(&log, bin, &out)?;
            println!(
                "{} memes, {} hits, max {}",
                s.meme_count, s.total_hits, s.max_hits
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
