//! Command-line surface.
//!
//! Thin orchestration over the library: parse a vote log, run an
//! estimator or experiment, write machine-readable reports plus a
//! reproducibility manifest. See each subcommand's `--help` for flags.

pub mod commands;
pub mod io;
pub mod reports;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::arena::ArenaError;
use crate::core::CoreError;
use crate::melo::{FitError, OptimConfig};
use crate::metrics::MetricsError;
use crate::perturb::{PerturbError, PerturbationStrategy};
use crate::sim::SimError;

pub use io::{parse_records, parse_records_str, write_records, ParseReport};

/// Rating engine for pairwise model arenas.
#[derive(Debug, Parser)]
#[command(name = "arena-elo", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit ratings on a vote log and write a leaderboard.
    Fit(FitArgs),
    /// Score held-out prediction quality (MSE, AUC) over seeded splits.
    Predict(PredictArgs),
    /// Sweep perturbation strategies and ratios; write consistency and
    /// detection tables.
    Simulate(SimulateArgs),
    /// Fit annotator abilities and flag suspected anomalous annotators.
    Detect(DetectArgs),
    /// Measure ranking stability across repeated seeded fits.
    Consistency(ConsistencyArgs),
    /// Tabulate pairwise win and tie counts.
    Winmatrix(WinmatrixArgs),
    /// Run the continual arena loop against a persistent state file.
    #[command(subcommand)]
    Arena(ArenaCommand),
}

/// Rating method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Sequential update rule, order-sensitive; reported as the mean over
    /// seeded record shuffles.
    Elo,
    /// Batch maximum likelihood with a shared scale.
    Melo,
    /// Batch maximum likelihood with per-annotator abilities.
    Amelo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Elo => "elo",
            Method::Melo => "melo",
            Method::Amelo => "amelo",
        })
    }
}

/// Batch solver selector for the shared-scale method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Gd,
    Newton,
}

/// Strategy flag wrapper so the library enum stays CLI-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyOpt {
    Random,
    Equal,
    Flip,
    Mixed,
}

impl From<StrategyOpt> for PerturbationStrategy {
    fn from(value: StrategyOpt) -> PerturbationStrategy {
        match value {
            StrategyOpt::Random => PerturbationStrategy::Random,
            StrategyOpt::Equal => PerturbationStrategy::Equal,
            StrategyOpt::Flip => PerturbationStrategy::Flip,
            StrategyOpt::Mixed => PerturbationStrategy::Mixed,
        }
    }
}

/// Estimator parameters shared across subcommands, with the documented
/// defaults. Serialized into every manifest.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Gradient step size.
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    /// Full-batch epochs.
    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,
    /// RNG seed for anything randomized (shuffles, splits, inits).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Drop annotators with fewer than this many records before fitting.
    #[arg(long, default_value_t = 50)]
    pub delta: usize,
    /// Ability threshold: fitted theta below this is flagged.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Record shuffles for the sequential method's mean rating.
    #[arg(long, default_value_t = 1000)]
    pub shuffles: usize,
    /// Skip the sum-to-one ability constraint (diagnostic mode).
    #[arg(long, default_value_t = false)]
    pub no_norm: bool,
}

impl RunConfig {
    pub fn optim(&self) -> OptimConfig {
        OptimConfig {
            learning_rate: self.lr,
            epochs: self.epochs,
            ..OptimConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Vote log (JSON Lines).
    #[arg(long)]
    pub input: std::path::PathBuf,
    /// Output directory for reports.
    #[arg(long)]
    pub out: std::path::PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Melo)]
    pub method: Method,
    /// Batch solver (shared-scale method only).
    #[arg(long, value_enum, default_value_t = Solver::Gd)]
    pub solver: Solver,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub input: std::path::PathBuf,
    #[arg(long)]
    pub out: std::path::PathBuf,
    /// Number of seeded 80/20 train/test splits.
    #[arg(long, default_value_t = 10)]
    pub splits: usize,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Vote log to perturb; omitted, a synthetic arena is generated.
    #[arg(long)]
    pub input: Option<std::path::PathBuf>,
    #[arg(long)]
    pub out: std::path::PathBuf,
    /// Restrict the sweep to one strategy.
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyOpt>,
    /// Restrict the sweep to one corruption ratio.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Synthetic arena size when no input is given.
    #[arg(long, default_value_t = 20)]
    pub models: usize,
    #[arg(long, default_value_t = 40)]
    pub annotators: usize,
    /// Records per annotator in the synthetic arena.
    #[arg(long, default_value_t = 100)]
    pub records: usize,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: std::path::PathBuf,
    #[arg(long)]
    pub out: std::path::PathBuf,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Args)]
pub struct ConsistencyArgs {
    /// Vote log; omitted, a well-separated synthetic arena is generated.
    #[arg(long)]
    pub input: Option<std::path::PathBuf>,
    #[arg(long)]
    pub out: std::path::PathBuf,
    /// Independent seeded fits to compare.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    /// Epoch stride between consistency measurements.
    #[arg(long, default_value_t = 10)]
    pub snapshot_every: usize,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Args)]
pub struct WinmatrixArgs {
    #[arg(long)]
    pub input: std::path::PathBuf,
    #[arg(long)]
    pub out: std::path::PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ArenaCommand {
    /// Create a fresh arena state file.
    Init(ArenaInitArgs),
    /// Append a batch of votes to the arena.
    Ingest(ArenaIngestArgs),
    /// Fit the eligible subset, update the leaderboard, apply the
    /// ability gate.
    Evaluate(ArenaEvaluateArgs),
    /// Print the arena's current standing.
    Status(ArenaStatusArgs),
    /// Lift an annotator's ban.
    Unban(ArenaUnbanArgs),
}

#[derive(Debug, Args)]
pub struct ArenaInitArgs {
    /// State file to create.
    #[arg(long)]
    pub state: std::path::PathBuf,
    /// Overwrite an existing state file.
    #[arg(long, default_value_t = false)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct ArenaIngestArgs {
    #[arg(long)]
    pub state: std::path::PathBuf,
    /// Batch of votes (JSON Lines).
    #[arg(long)]
    pub input: std::path::PathBuf,
}

#[derive(Debug, Args)]
pub struct ArenaEvaluateArgs {
    #[arg(long)]
    pub state: std::path::PathBuf,
    /// Optional report directory; stdout gets a summary either way.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Report would-be bans without applying them.
    #[arg(long, default_value_t = false)]
    pub warn_only: bool,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Args)]
pub struct ArenaStatusArgs {
    #[arg(long)]
    pub state: std::path::PathBuf,
}

#[derive(Debug, Args)]
pub struct ArenaUnbanArgs {
    #[arg(long)]
    pub state: std::path::PathBuf,
    #[arg(long)]
    pub annotator: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Input { path: String, source: std::io::Error },
    #[error("cannot write `{path}`: {source}")]
    Output { path: String, source: std::io::Error },
    #[error("cannot write report `{path}`: {source}")]
    Report { path: String, source: csv::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{0}")]
    Invalid(String),
}

/// Runs a parsed command line; the binary maps errors to exit code 1.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit(args) => commands::fit(args),
        Command::Predict(args) => commands::predict(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Detect(args) => commands::detect(args),
        Command::Consistency(args) => commands::consistency(args),
        Command::Winmatrix(args) => commands::winmatrix(args),
        Command::Arena(ArenaCommand::Init(args)) => commands::arena_init(args),
        Command::Arena(ArenaCommand::Ingest(args)) => commands::arena_ingest(args),
        Command::Arena(ArenaCommand::Evaluate(args)) => commands::arena_evaluate(args),
        Command::Arena(ArenaCommand::Status(args)) => commands::arena_status(args),
        Command::Arena(ArenaCommand::Unban(args)) => commands::arena_unban(args),
    }
}
