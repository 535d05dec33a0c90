//! Continual evaluation loop with annotator quality control.
//!
//! The arena accumulates comparison batches, rates them with the
//! annotator-aware fit, and polices annotators on two axes:
//!
//! * a volume gate: annotators with fewer than `delta` accumulated
//!   records sit out of the fit until they reach the bar (recomputed
//!   every round, never permanent), and
//! * an ability gate: annotators whose fitted ability falls below
//!   `epsilon` are banned, their records removed, and their future
//!   submissions dropped at ingest until an operator unbans them.
//!
//! Each round's fit warm-starts from the previous round's estimates, so
//! successive leaderboards move smoothly as data accumulates.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amelo::{fit_joint_with, JointFitResult, JointInit, JointOptions};
use crate::core::{AnnotatorId, ComparisonRecord, Dataset, RatingVector};
use crate::melo::{FitError, OptimConfig};

/// Current on-disk state format version.
pub const STATE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArenaConfig {
    /// Minimum accumulated records for an annotator to enter the fit.
    pub delta: usize,
    /// Ability threshold: fitted `theta < epsilon` triggers a ban.
    pub epsilon: f64,
    pub optim: OptimConfig,
    /// Report would-be bans without applying them.
    pub warn_only: bool,
}

impl Default for ArenaConfig {
    fn default() -> Self {
        ArenaConfig { delta: 50, epsilon: 0.0, optim: OptimConfig::default(), warn_only: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArenaState {
    accumulated: Dataset,
    banned: BTreeMap<AnnotatorId, String>,
    latest: Option<JointFitResult>,
    round: u64,
}

/// What happened to one ingested batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    /// Value of the round counter after this ingest.
    pub round: u64,
    pub accepted: usize,
    /// Batch positions and reasons for records that failed validation.
    pub rejected: Vec<(usize, String)>,
    /// Records dropped because their annotator is banned.
    pub dropped_banned: usize,
}

/// One evaluation's leaderboard and annotator verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: u64,
    /// Models in the eligible subset this round.
    pub eligible_models: usize,
    pub eligible_records: usize,
    pub fit: JointFitResult,
    /// Annotators whose ability fell below epsilon, with the fitted value.
    /// Applied as bans unless the config is warn-only.
    pub flagged: Vec<(AnnotatorId, f64)>,
    pub warn_only: bool,
}

impl RoundReport {
    pub fn leaderboard(&self) -> &RatingVector {
        &self.fit.ratings
    }
}

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error("state file I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("state document is corrupt: {0}")]
    Corrupt(#[from] serde_json::Error),
    #[error("state version {found} is not supported (this build reads version {STATE_VERSION})")]
    UnsupportedVersion { found: u32 },
    #[error("eligible subset has {models} models; need at least 2 to evaluate")]
    NotEnoughEligible { models: usize },
    #[error("round fit failed: {0}")]
    Fit(#[from] FitError),
}

impl ArenaState {
    pub fn new() -> ArenaState {
        ArenaState::default()
    }

    pub fn accumulated(&self) -> &Dataset {
        &self.accumulated
    }

    pub fn banned(&self) -> &BTreeMap<AnnotatorId, String> {
        &self.banned
    }

    pub fn latest(&self) -> Option<&JointFitResult> {
        self.latest.as_ref()
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Appends a batch. Bad records are rejected individually, banned
    /// annotators' records are dropped, and the round counter always
    /// advances, even for an empty batch.
    pub fn ingest(&mut self, batch: &[ComparisonRecord]) -> IngestReport {
        self.round += 1;
        let mut rejected = Vec::new();
        let mut dropped_banned = 0;
        let mut kept: Vec<ComparisonRecord> = self.accumulated.records().to_vec();
        let mut accepted = 0;
        for (position, record) in batch.iter().enumerate() {
            if let Some(reason) = malformed(record) {
                rejected.push((position, reason));
                continue;
            }
            if self.banned.contains_key(&record.annotator) {
                dropped_banned += 1;
                continue;
            }
            kept.push(record.clone());
            accepted += 1;
        }
        self.accumulated = Dataset::from_records(kept);
        IngestReport { round: self.round, accepted, rejected, dropped_banned }
    }

    /// Records from annotators at or above `delta` accumulated records.
    /// Recomputed from current counts: an annotator below the bar today
    /// re-enters as soon as their count reaches it.
    pub fn eligible_subset(&self, delta: usize) -> Dataset {
        self.accumulated.filter_min_records(delta)
    }

    /// Fits the eligible subset, stores the result, and applies the
    /// ability gate.
    pub fn evaluate_round(&mut self, cfg: &ArenaConfig) -> Result<RoundReport, ArenaError> {
        let eligible = self.eligible_subset(cfg.delta);
        if eligible.n_models() < 2 {
            return Err(ArenaError::NotEnoughEligible { models: eligible.n_models() });
        }
        let init = match &self.latest {
            Some(previous) => JointInit::Warm {
                ratings: previous.ratings.clone(),
                abilities: previous.abilities.clone(),
            },
            None => JointInit::Default,
        };
        let opts = JointOptions { init, ..JointOptions::default() };
        let (fit, _) = fit_joint_with(&eligible, &cfg.optim, &opts)?;

        let flagged: Vec<(AnnotatorId, f64)> = fit
            .abilities
            .iter()
            .filter(|(_, theta)| *theta < cfg.epsilon)
            .map(|(annotator, theta)| (annotator.clone(), theta))
            .collect();
        if !cfg.warn_only && !flagged.is_empty() {
            for (annotator, theta) in &flagged {
                self.banned.insert(
                    annotator.clone(),
                    format!("ability {theta:.6} below threshold {} at round {}", cfg.epsilon, self.round),
                );
            }
            let kept: Vec<ComparisonRecord> = self
                .accumulated
                .records()
                .iter()
                .filter(|record| !self.banned.contains_key(&record.annotator))
                .cloned()
                .collect();
            self.accumulated = Dataset::from_records(kept);
        }
        self.latest = Some(fit.clone());
        Ok(RoundReport {
            round: self.round,
            eligible_models: eligible.n_models(),
            eligible_records: eligible.n_records(),
            fit,
            flagged,
            warn_only: cfg.warn_only,
        })
    }

    /// Lifts a ban; returns the recorded reason if the annotator was
    /// banned. Their removed records are gone; only future submissions
    /// are accepted again.
    pub fn unban(&mut self, annotator: &AnnotatorId) -> Option<String> {
        self.banned.remove(annotator)
    }

    pub fn to_json(&self) -> Result<String, ArenaError> {
        let file = StateFile { version: STATE_VERSION, state: self.clone() };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(document: &str) -> Result<ArenaState, ArenaError> {
        let envelope: VersionProbe = serde_json::from_str(document)?;
        if envelope.version != STATE_VERSION {
            return Err(ArenaError::UnsupportedVersion { found: envelope.version });
        }
        let file: StateFile = serde_json::from_str(document)?;
        Ok(file.state)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ArenaError> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ArenaState, ArenaError> {
        ArenaState::from_json(&fs::read_to_string(path)?)
    }
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "round {}: accepted {}, rejected {}, dropped (banned) {}",
            self.round,
            self.accepted,
            self.rejected.len(),
            self.dropped_banned
        )
    }
}

fn malformed(record: &ComparisonRecord) -> Option<String> {
    if record.first.as_str().is_empty() || record.second.as_str().is_empty() {
        return Some("empty model id".to_string());
    }
    if record.annotator.as_str().is_empty() {
        return Some("empty annotator id".to_string());
    }
    if record.first == record.second {
        return Some(format!("model `{}` cannot battle itself", record.first));
    }
    None
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    version: u32,
    state: ArenaState,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}
