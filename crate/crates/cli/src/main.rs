//! `aphase`: ingestion, training and experiments for A-phase classification.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use aphase_core::data::ClassCounts;
use aphase_core::Task;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "aphase", version, about = "A-phase classification from EEG log-spectrograms")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Repeat for more detail (-v: per-epoch loss, -vv: debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extract segments from an EDF recording and its CAP scoring file.
    Prepare(PrepareArgs),
    /// Write a synthetic subject.
    Synth(SynthArgs),
    /// Split, train, evaluate on the held-out side and save a checkpoint.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a dataset or on the test side of a split.
    Evaluate(EvaluateArgs),
    /// Run a training-fraction sweep or the retraining protocol.
    Experiment(ExperimentArgs),
    /// Render aggregate tables from results files.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct PrepareArgs {
    #[arg(long)]
    pub edf: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub subject: String,
    /// Channel label; defaults to the configured priority list.
    #[arg(long)]
    pub channel: Option<String>,
    /// Output dataset; defaults to `<datasets>/<subject>.capd`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Segments per class as `N,A1,A2,A3`.
    #[arg(long)]
    pub counts: ClassCounts,
    #[arg(long, default_value = "synthetic")]
    pub subject: String,
    /// Output dataset; defaults to `<datasets>/<subject>.capd`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct TrainOverrides {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// `an` or `subtype`.
    #[arg(long)]
    pub task: Task,
    #[arg(long)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output checkpoint; defaults to `<checkpoints>/<subject>-<task>-<seed>.capn`.
    #[arg(long)]
    pub checkpoint_out: Option<PathBuf>,
    /// Per-iteration loss history as CSV.
    #[arg(long)]
    pub loss_out: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: TrainOverrides,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// With `--seed`, evaluate only the test side of this split.
    #[arg(long, requires = "seed")]
    pub fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Sweep,
    Retrain,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Sweep => "sweep",
            Mode::Retrain => "retrain",
        }
    }
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// One dataset per subject.
    #[arg(long, required = true, num_args = 1..)]
    pub dataset: Vec<PathBuf>,
    #[arg(long)]
    pub task: Task,
    #[arg(long, value_enum, default_value_t = Mode::Sweep)]
    pub mode: Mode,
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
    #[arg(long)]
    pub base_fraction: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub validated_fractions: Option<Vec<f64>>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub base_seed: Option<u64>,
    /// Runs trained concurrently.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Results CSV; defaults to `<reports>/<mode>-<task>.csv`.
    #[arg(long)]
    pub results_out: Option<PathBuf>,
    /// Markdown table; defaults to `<reports>/<mode>-<task>.md`.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: TrainOverrides,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub results: Vec<PathBuf>,
    /// Write the tables here as well as to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
