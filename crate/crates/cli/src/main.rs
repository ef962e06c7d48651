//! `chiomega`: generate labeled graph datasets, train and evaluate
//! χ/ω regressors, and summarize the results.
//!
//! Exit codes: 0 success, 2 usage, 3 data or I/O, 4 solver budget,
//! 5 numeric failure during training.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use chiomega_core::dataset::{DatasetError, Split, Target};
use chiomega_core::learner::{ArchKind, LearnerError};
use chiomega_core::nn::NnError;
use clap::{Args, Parser, Subcommand};

pub const THREADS_ENV: &str = "CHIOMEGA_THREADS";

#[derive(Debug, Parser)]
#[command(name = "chiomega", version, about = "Exact graph labels and neural χ/ω regressors")]
struct Cli {
    /// Worker threads (default: $CHIOMEGA_THREADS, else one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate random embedded graphs and label them exactly.
    Generate(GenerateArgs),
    /// Recompute the labels of an existing dataset.
    Label(LabelArgs),
    /// Split one dataset into train/valid/test files.
    Split(SplitArgs),
    /// Label distribution of a dataset.
    Stats(StatsArgs),
    /// Export a dataset as CSV.
    ExportCsv(ExportArgs),
    /// Train a model for one target.
    Train(TrainArgs),
    /// Evaluate a trained model on a test set.
    Eval(EvalArgs),
    /// Combine evaluation reports into one comparison table.
    Report(ReportArgs),
    /// Print a model architecture.
    Arch(ArchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Largest graph order N; every file record is padded to N vertices.
    #[arg(long)]
    pub max_order: usize,
    /// Graphs per source order n = 2..=N.
    #[arg(long)]
    pub per_order: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "train")]
    pub split: Split,
    #[arg(long)]
    pub out: PathBuf,
    /// Branch-and-bound node limit per graph before it is redrawn.
    #[arg(long, default_value_t = chiomega_core::oracles::DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    /// Write records without labels.
    #[arg(long)]
    pub no_label: bool,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = chiomega_core::oracles::DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Train, valid and test fractions, comma separated.
    #[arg(long, default_value = "0.8,0.1,0.1")]
    pub fractions: String,
    #[arg(long)]
    pub seed: u64,
    /// Output prefix; writes PREFIX.train.chrg, PREFIX.valid.chrg, PREFIX.test.chrg.
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub target: Target,
    /// Histogram CSV (`value,count`).
    #[arg(long)]
    pub out: PathBuf,
    /// Also draw the histogram as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub arch: ArchKind,
    /// Width multiplier in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub target: Target,
    #[arg(long)]
    pub train: PathBuf,
    /// Validation set for early stopping (not needed for regression).
    #[arg(long)]
    pub valid: Option<PathBuf>,
    /// Output prefix: PREFIX.reg for regression, otherwise PREFIX.arch,
    /// PREFIX.ckpt and PREFIX.history.csv.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 5)]
    pub patience: usize,
    #[arg(long, default_value_t = 128)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub learning_rate: f64,
    /// Seeds weight initialization and minibatch shuffles.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model prefix given to `train`, or `oracle` for exact labels.
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub target: Target,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Model name used in the report (default: file name of the prefix).
    #[arg(long)]
    pub name: Option<String>,
    /// Bin width of the grouped error statistics.
    #[arg(long, default_value_t = 2)]
    pub bin_width: u32,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report CSVs written by `eval`.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Model whose MAE the others are compared with.
    #[arg(long, default_value = "regression")]
    pub baseline: String,
}

#[derive(Debug, Args)]
pub struct ArchArgs {
    #[arg(long)]
    pub arch: ArchKind,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 50)]
    pub order: usize,
    /// Print a layer table with shapes instead of the architecture file.
    #[arg(long)]
    pub summary: bool,
}

pub mod exit {
    pub const USAGE: u8 = 2;
    pub const DATA: u8 = 3;
    pub const BUDGET: u8 = 4;
    pub const NUMERIC: u8 = 5;
}

/// A failure already classified by the command that saw it.
#[derive(Debug)]
pub struct Classified {
    pub code: u8,
    pub message: String,
}

impl std::fmt::Display for Classified {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Classified {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    Classified {
        code: exit::USAGE,
        message: message.into(),
    }
    .into()
}

fn nn_code(e: &NnError) -> u8 {
    match e {
        NnError::NonFiniteLoss { .. } => exit::NUMERIC,
        NnError::InvalidConfig(_) => exit::USAGE,
        _ => exit::DATA,
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(c) = cause.downcast_ref::<Classified>() {
            return c.code;
        }
        if let Some(e) = cause.downcast_ref::<DatasetError>() {
            return match e {
                DatasetError::BudgetExhausted { .. } | DatasetError::LabelBudget { .. } => exit::BUDGET,
                DatasetError::Generate(_) | DatasetError::InvalidFractions(_) => exit::USAGE,
                _ => exit::DATA,
            };
        }
        if let Some(e) = cause.downcast_ref::<NnError>() {
            return nn_code(e);
        }
        if let Some(e) = cause.downcast_ref::<LearnerError>() {
            return match e {
                LearnerError::InvalidScale(_) | LearnerError::UnknownArch(_) => exit::USAGE,
                LearnerError::Nn(inner) => nn_code(inner),
                _ => exit::DATA,
            };
        }
    }
    exit::DATA
}

fn threads(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = threads(cli.threads)? {
        if n == 0 {
            return Err(usage("thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Label(a) => commands::label(a),
        Command::Split(a) => commands::split(a),
        Command::Stats(a) => commands::stats(a),
        Command::ExportCsv(a) => commands::export_csv(a),
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Report(a) => commands::report(a),
        Command::Arch(a) => commands::arch(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
