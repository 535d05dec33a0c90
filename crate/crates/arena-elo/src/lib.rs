//! Pairwise rating engine for model arenas.
//!
//! Three estimators over the same comparison data, plus the tooling the
//! rating workflow needs around them:
//!
//! - [`classic`]: sequential Elo updates, whose order sensitivity is
//!   measured with seeded shuffle studies.
//! - [`melo`]: batch maximum-likelihood ratings (gradient ascent or
//!   Newton; the likelihood is concave after gauge fixing).
//! - [`amelo`]: joint maximum likelihood over ratings and per-annotator
//!   discrimination abilities; negative ability marks an annotator whose
//!   judgments oppose the consensus.
//! - [`perturb`] and [`metrics`]: annotation-corruption strategies and the
//!   consistency / detection metrics used to compare methods under them.
//! - [`arena`]: a streaming loop that ingests batches, filters thin
//!   annotators, refits, and bans anomalous annotators, with versioned
//!   JSON state.
//! - [`sim`]: seeded synthetic arena generators.
//! - [`cli`]: JSONL ingestion and the report-writing subcommands behind
//!   the `arena-elo` binary.
//!
//! Each capability has a runnable demo under `examples/`; start with
//! `cargo run --example mle_leaderboard`.

pub mod amelo;
pub mod arena;
pub mod classic;
pub mod cli;
pub mod core;
pub mod melo;
pub mod metrics;
mod numeric;
pub mod perturb;
pub mod sim;

pub use crate::core::{
    win_prob, AbilityVector, AnnotatorId, ComparisonRecord, CoreError, Dataset, ModelId, Outcome,
    RatingVector, ScaleConstant, ValidationIssue, ValidationReport, WinMatrix,
};
