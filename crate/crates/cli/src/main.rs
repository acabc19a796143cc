//! `boostdistill`: train models, distill a boosted tree into a decision
//! tree, run the retraining baseline, explain predictions, compare models
//! and run the benchmark protocol.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal
//! invariant failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use config::ConfigFile;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(boostdistill::Error),
    Internal(String),
}

impl From<boostdistill::Error> for CliError {
    fn from(e: boostdistill::Error) -> Self {
        match e {
            boostdistill::Error::Precondition(m) => CliError::Internal(m),
            other => CliError::Data(other),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(e) => write!(f, "{e}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "boostdistill",
    version,
    about = "Distill boosted trees into decision trees by rectification"
)]
struct Cli {
    /// TOML file with one table per subcommand; flags take precedence.
    #[arg(long, global = true, env = "BOOSTDISTILL_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a decision tree or a boosted tree from a labelled CSV file.
    Train(TrainFlags),
    /// Correct a decision tree over a stream of instances by rectification.
    Distill(DistillFlags),
    /// Correct a decision tree over a stream by retraining it.
    RetrainCorrect(RetrainFlags),
    /// Explain one prediction of a model.
    Explain(ExplainFlags),
    /// Run the measurement protocol and write report files.
    Bench(BenchFlags),
    /// List the instances on which two models disagree.
    Diff(DiffFlags),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Dt,
    Bt,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamOrder {
    #[default]
    Dataset,
    Shuffle,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiteralOrder {
    #[default]
    Descending,
    Ascending,
    Shuffled,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Sufficient reason for decision trees, tree-specific for boosted trees.
    #[default]
    Auto,
    TreeSpecific,
    /// Exact subset-minimal reason for boosted trees (exponential).
    Exact,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodSel {
    Rectify,
    Retrain,
    #[default]
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfigSel {
    Default,
    Optimized,
    #[default]
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleRuleArg {
    #[default]
    Cap,
    Max,
}

#[derive(Args, Serialize)]
pub struct TrainFlags {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Labelled CSV file.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Learn the decision tree over this boosted tree's conditions.
    #[arg(long)]
    bt: Option<PathBuf>,
    /// Learn the decision tree over the conditions in this file.
    #[arg(long)]
    conditions: Option<PathBuf>,
    /// Depth bound for decision trees (unbounded by default).
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    n_estimators: Option<usize>,
    /// Depth of each boosted regression tree.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long)]
    subsample: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Thresholds per numeric column in the candidate pool.
    #[arg(long)]
    max_thresholds: Option<usize>,
}

#[derive(Args, Serialize)]
pub struct DistillFlags {
    #[arg(long)]
    bt: Option<PathBuf>,
    #[arg(long)]
    dt: Option<PathBuf>,
    /// Instances to stream (CSV; the label column is ignored).
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON lines, one per correction step.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    #[arg(long, value_enum)]
    stream_order: Option<StreamOrder>,
    #[arg(long)]
    shuffle_seed: Option<u64>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Skip simplification after each rectification.
    #[arg(long)]
    no_simplify: bool,
    #[arg(long, value_enum)]
    deletion_order: Option<LiteralOrder>,
    #[arg(long)]
    deletion_seed: Option<u64>,
}

#[derive(Args, Serialize)]
pub struct RetrainFlags {
    #[arg(long)]
    bt: Option<PathBuf>,
    #[arg(long)]
    dt: Option<PathBuf>,
    /// Training set the decision tree was learned from.
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Where to write the augmented training set (CSV of condition bits).
    #[arg(long)]
    train_out: Option<PathBuf>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, value_enum)]
    sample_rule: Option<SampleRuleArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, value_enum)]
    deletion_order: Option<LiteralOrder>,
    #[arg(long)]
    deletion_seed: Option<u64>,
}

#[derive(Args, Serialize)]
pub struct ExplainFlags {
    #[arg(long)]
    model: Option<PathBuf>,
    /// Attribute values, e.g. `S=25,R=1,PP=1`.
    #[arg(long)]
    row: Option<String>,
    /// CSV file holding the instance (with --index).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Zero-based row of --data.
    #[arg(long)]
    index: Option<usize>,
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long, value_enum)]
    deletion_order: Option<LiteralOrder>,
    #[arg(long)]
    deletion_seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct BenchFlags {
    /// CSV file, or `synthetic` for the built-in generator.
    #[arg(long)]
    dataset: Option<String>,
    /// Rows generated for the synthetic dataset.
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    data_seed: Option<u64>,
    #[arg(long, value_enum)]
    method: Option<MethodSel>,
    #[arg(long = "tree-config", value_enum)]
    tree_config: Option<ConfigSel>,
    /// Comma-separated seeds; each gives its own split and runs.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    timeout_ms: Option<u64>,
    /// Instances timed per latency comparison; 0 skips it.
    #[arg(long)]
    queries: Option<usize>,
    /// Defaults to $BOOSTDISTILL_REPORT_DIR, then `reports`.
    #[arg(long)]
    report_dir: Option<PathBuf>,
    #[arg(long)]
    n_estimators: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    max_thresholds: Option<usize>,
    /// Fixed depth for the optimized configuration (tuned on L otherwise).
    #[arg(long)]
    max_depth: Option<usize>,
    /// Fraction of rows held out from both L and T.
    #[arg(long)]
    holdout: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, value_enum)]
    sample_rule: Option<SampleRuleArg>,
    #[arg(long, value_enum)]
    deletion_order: Option<LiteralOrder>,
    #[arg(long)]
    deletion_seed: Option<u64>,
    #[arg(long)]
    no_simplify: bool,
}

#[derive(Args, Serialize)]
pub struct DiffFlags {
    #[arg(long)]
    a: Option<PathBuf>,
    #[arg(long)]
    b: Option<PathBuf>,
    /// Enumerate every feasible instance when the space is small enough.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Train(f) => commands::train(file.resolve("train", &f)?),
        Command::Distill(f) => commands::distill(file.resolve("distill", &f)?),
        Command::RetrainCorrect(f) => commands::retrain_correct(file.resolve("retrain_correct", &f)?),
        Command::Explain(f) => commands::explain(file.resolve("explain", &f)?),
        Command::Bench(f) => commands::bench(file.resolve("bench", &f)?),
        Command::Diff(f) => commands::diff(file.resolve("diff", &f)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("boostdistill: {e}");
            ExitCode::from(e.code())
        }
    }
}
