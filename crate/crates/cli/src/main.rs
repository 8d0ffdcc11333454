//! `tbr`: run repertoire evolution and its baselines, and post-process
//! their CSV output.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "tbr", version, about = "Hexapod behavioral repertoire evolution with a transferability objective")]
pub struct Cli {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Random seed; overrides the configured one.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a repertoire and write archive, metrics, stats and transfers CSVs.
    Evolve {
        /// Output directory; overrides `output_dir`.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Disable the transfer loop (two objectives, no pseudo-real runs).
        #[arg(long)]
        no_transfers: bool,
    },
    /// Run a comparison algorithm: ns, nslc, per-target-nearest,
    /// per-target-orientation or reference-transfer.
    Baseline {
        kind: String,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Metric curve of an archive CSV, rebuilt from id-prefix snapshots.
    Metrics {
        archive: PathBuf,
        /// Write here instead of standard output.
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Best-estimated controller of each of the 30 annulus cells.
    Select30 {
        archive: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Execute a selection on the pseudo-real robot and report accuracies.
    TransferEval {
        selection: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Print the body trajectory of one genotype (24 comma-separated values).
    Replay {
        #[arg(allow_hyphen_values = true)]
        genotype: String,
        /// Roll out on the pseudo-real robot instead of the simulator.
        #[arg(long)]
        real: bool,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Spread target points over the region of interest with k-means.
    Targets {
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
