//! `crowdtruth` command-line front end.

mod commands;
mod method;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::method::BwaArgs;

#[derive(Debug, Parser)]
#[command(name = "crowdtruth", version, about = "Aggregate redundant crowd labels into consensus labels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Aggregate one label file into per-item predictions.
    Aggregate(AggregateArgs),
    /// Run several methods over a directory of datasets and compare them with MV.
    Bench(BenchArgs),
    /// Accuracy of BWA over a grid of a_v values under both error-rate strategies.
    Sweep(SweepArgs),
    /// Generate a synthetic crowd with known truth.
    Synth(SynthArgs),
    /// Score a prediction file against a truth file.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct AggregateArgs {
    /// Label file with header `question,worker,answer`.
    #[arg(long)]
    labels: PathBuf,
    /// One of mv, ds, bwa, bwa-av30-original, bwa-av15-adjusted.
    #[arg(long, default_value = "bwa")]
    method: String,
    #[command(flatten)]
    bwa: BwaArgs,
    /// Number of classes, when the answers do not cover all of them.
    #[arg(long)]
    k: Option<usize>,
    /// Prediction file (`question,label`). BWA diagnostics are written next
    /// to it as `<stem>.workers.csv` and `<stem>.summary.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Directory with one sub-directory per dataset holding answer.csv and truth.csv.
    #[arg(long)]
    datasets: PathBuf,
    /// Comma-separated methods; mv is always included as the baseline.
    #[arg(long, default_value = "mv,ds,bwa-av30-original,bwa-av15-adjusted", value_delimiter = ',')]
    method: Vec<String>,
    #[command(flatten)]
    bwa: BwaArgs,
    /// JSON report; an aligned text table is written alongside with a .txt extension.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Comma-separated a_v values.
    #[arg(long, value_delimiter = ',', default_value = "1,5,10,15,20,25,30,35,40,45,50")]
    grid: Vec<f64>,
    #[arg(long, default_value_t = crowdtruth::bwa::DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = crowdtruth::bwa::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value_t = crowdtruth::bwa::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long)]
    k: Option<usize>,
    /// CSV with one record per (a_v, strategy).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    items: usize,
    #[arg(long)]
    workers: usize,
    /// Number of classes.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Labels per item.
    #[arg(long)]
    redundancy: usize,
    /// Worker accuracy interval as `low,high`.
    #[arg(long, value_delimiter = ',', default_values_t = [0.55, 0.95])]
    accuracy: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; receives answer.csv and truth.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Label file the predictions were made from (provides the id and class maps).
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Prediction file with header `question,label`.
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    k: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Aggregate(a) => commands::aggregate(&a.labels, &a.method, &a.bwa, a.k, &a.out),
        Command::Bench(b) => commands::bench(&b.datasets, &b.method, &b.bwa, &b.out),
        Command::Sweep(s) => commands::sweep(&s),
        Command::Synth(s) => commands::synth(&s),
        Command::Eval(e) => commands::eval(&e.labels, &e.truth, &e.pred, e.k),
    }
}
