//! Controlled annotator corruption.
//!
//! Rewrites the outcomes of every record belonging to a chosen set of
//! annotators, leaving all other records untouched byte for byte. Used to
//! measure how much each rating method moves under noise and whether the
//! ability model pins the corrupted annotators.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{AnnotatorId, ComparisonRecord, Dataset, Outcome};
use crate::numeric::stream_rng;

/// How a targeted annotator's outcomes are rewritten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationStrategy {
    /// Decisive outcomes become a coin flip between a tie and the
    /// opposite result; ties stay ties.
    Random,
    /// Every outcome becomes a tie.
    Equal,
    /// Winner and loser swap; ties stay ties.
    Flip,
    /// Each record independently picks one of the other three strategies.
    Mixed,
}

impl fmt::Display for PerturbationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerturbationStrategy::Random => "random",
            PerturbationStrategy::Equal => "equal",
            PerturbationStrategy::Flip => "flip",
            PerturbationStrategy::Mixed => "mixed",
        })
    }
}

impl FromStr for PerturbationStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(PerturbationStrategy::Random),
            "equal" => Ok(PerturbationStrategy::Equal),
            "flip" => Ok(PerturbationStrategy::Flip),
            "mixed" => Ok(PerturbationStrategy::Mixed),
            other => Err(format!("unknown strategy `{other}` (expected random, equal, flip or mixed)")),
        }
    }
}

/// Which annotators to corrupt and how.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationPlan {
    pub targets: BTreeSet<AnnotatorId>,
    pub strategy: PerturbationStrategy,
    pub seed: u64,
    /// Corrupting a majority of annotators makes "anomalous" the consensus
    /// and flips what the fit can recover, so it is refused unless asked.
    pub allow_majority: bool,
}

impl PerturbationPlan {
    pub fn new(
        targets: impl IntoIterator<Item = AnnotatorId>,
        strategy: PerturbationStrategy,
        seed: u64,
    ) -> Self {
        PerturbationPlan {
            targets: targets.into_iter().collect(),
            strategy,
            seed,
            allow_majority: false,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PerturbError {
    #[error("cannot corrupt {n_targets} of {n_annotators} annotators (limit {limit}); set allow_majority to override")]
    TargetLimitExceeded { n_targets: usize, n_annotators: usize, limit: usize },
    #[error("target annotator `{0}` has no records in the dataset")]
    UnknownAnnotator(AnnotatorId),
}

/// Applies `plan` and returns the rewritten dataset together with the
/// target set (the detection ground truth).
///
/// Each record draws from its own RNG stream keyed by `(plan.seed,
/// insertion index)`, so the rewrite of one record never depends on how
/// many targets precede it and identical plans reproduce bit-identical
/// datasets.
pub fn apply(
    data: &Dataset,
    plan: &PerturbationPlan,
) -> Result<(Dataset, BTreeSet<AnnotatorId>), PerturbError> {
    for target in &plan.targets {
        if data.annotator_index(target).is_none() {
            return Err(PerturbError::UnknownAnnotator(target.clone()));
        }
    }
    let limit = data.n_annotators() / 2;
    if !plan.allow_majority && plan.targets.len() > limit {
        return Err(PerturbError::TargetLimitExceeded {
            n_targets: plan.targets.len(),
            n_annotators: data.n_annotators(),
            limit,
        });
    }

    let records = data
        .records()
        .iter()
        .enumerate()
        .map(|(index, record)| {
            if !plan.targets.contains(&record.annotator) {
                return record.clone();
            }
            let mut rng = stream_rng(plan.seed, index as u64);
            let strategy = match plan.strategy {
                PerturbationStrategy::Mixed => match rng.gen_range(0..3u8) {
                    0 => PerturbationStrategy::Random,
                    1 => PerturbationStrategy::Equal,
                    _ => PerturbationStrategy::Flip,
                },
                fixed => fixed,
            };
            let outcome = match strategy {
                PerturbationStrategy::Equal => Outcome::Tie,
                PerturbationStrategy::Flip => record.outcome.flipped(),
                PerturbationStrategy::Random => {
                    perturb_outcome_random(record.outcome, rng.gen_range(0.0..1.0))
                }
                PerturbationStrategy::Mixed => unreachable!("mixed resolves to a concrete strategy"),
            };
            ComparisonRecord { outcome, ..record.clone() }
        })
        .collect();
    Ok((Dataset::from_records(records), plan.targets.clone()))
}

/// Random-strategy rewrite of one outcome given a uniform draw in [0, 1):
/// a decisive outcome becomes a tie when `draw < 0.5` and the opposite
/// result otherwise; ties are unchanged.
pub fn perturb_outcome_random(outcome: Outcome, draw: f64) -> Outcome {
    if !outcome.is_decisive() {
        return outcome;
    }
    if draw < 0.5 {
        Outcome::Tie
    } else {
        outcome.flipped()
    }
}
