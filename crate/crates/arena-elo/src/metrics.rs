//! Evaluation metrics: prediction error, discrimination, ranking
//! stability, and anomaly-detection scores.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{AbilityVector, AnnotatorId, ModelId, RatingVector};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("length mismatch: {left} predictions vs {right} outcomes")]
    LengthMismatch { left: usize, right: usize },
    #[error("AUC is undefined when every outcome has the same label")]
    UndefinedAuc,
    #[error("rankings cover different model sets")]
    MismatchedModels,
    #[error("duplicate model `{0}` in ranking")]
    DuplicateModel(ModelId),
    #[error("need at least {needed} rankings, got {got}")]
    TooFewRankings { needed: usize, got: usize },
}

/// Mean squared error between predicted win probabilities and outcomes.
pub fn mse(predicted: &[f64], observed: &[f64]) -> Result<f64, MetricsError> {
    if predicted.len() != observed.len() {
        return Err(MetricsError::LengthMismatch { left: predicted.len(), right: observed.len() });
    }
    if predicted.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = predicted
        .iter()
        .zip(observed)
        .map(|(p, w)| (p - w) * (p - w))
        .sum();
    Ok(sum / predicted.len() as f64)
}

/// Area under the ROC curve for decisive outcomes, computed from
/// tie-averaged ranks of the predictions.
///
/// Records with `W = 0.5` carry no class label and are skipped. Constant
/// predictions earn exactly 0.5; a single represented class is an error.
pub fn auc(predicted: &[f64], observed: &[f64]) -> Result<f64, MetricsError> {
    if predicted.len() != observed.len() {
        return Err(MetricsError::LengthMismatch { left: predicted.len(), right: observed.len() });
    }
    let decisive: Vec<(f64, bool)> = predicted
        .iter()
        .zip(observed)
        .filter(|(_, w)| **w != 0.5)
        .map(|(p, w)| (*p, *w > 0.5))
        .collect();
    let n_pos = decisive.iter().filter(|(_, label)| *label).count();
    let n_neg = decisive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricsError::UndefinedAuc);
    }

    // Rank the predictions ascending, averaging ranks across ties, then
    // apply the Mann-Whitney identity.
    let mut order: Vec<usize> = (0..decisive.len()).collect();
    order.sort_by(|&a, &b| decisive[a].0.total_cmp(&decisive[b].0));
    let mut ranks = vec![0.0; decisive.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && decisive[order[end + 1]].0 == decisive[order[start]].0 {
            end += 1;
        }
        let mean_rank = (start + end) as f64 / 2.0 + 1.0;
        for &idx in &order[start..=end] {
            ranks[idx] = mean_rank;
        }
        start = end + 1;
    }
    let rank_sum_pos: f64 = decisive
        .iter()
        .zip(&ranks)
        .filter(|((_, label), _)| *label)
        .map(|(_, rank)| rank)
        .sum();
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos * n_neg) as f64)
}

/// An ordering of models, best first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    order: Vec<ModelId>,
}

impl Ranking {
    /// Orders models by rating, descending; exact rating ties break by
    /// model id so the ranking is a deterministic function of the input.
    pub fn from_ratings(ratings: &RatingVector) -> Ranking {
        let mut order: Vec<ModelId> = ratings.models().to_vec();
        order.sort_by(|a, b| {
            let ra = ratings.get(a).unwrap();
            let rb = ratings.get(b).unwrap();
            rb.total_cmp(&ra).then_with(|| a.cmp(b))
        });
        Ranking { order }
    }

    pub fn from_order(order: impl IntoIterator<Item = ModelId>) -> Result<Ranking, MetricsError> {
        let order: Vec<ModelId> = order.into_iter().collect();
        let mut seen = BTreeSet::new();
        for model in &order {
            if !seen.insert(model.clone()) {
                return Err(MetricsError::DuplicateModel(model.clone()));
            }
        }
        Ok(Ranking { order })
    }

    pub fn order(&self) -> &[ModelId] {
        &self.order
    }

    /// Zero-based position of `model`, best is 0.
    pub fn position(&self, model: &ModelId) -> Option<usize> {
        self.order.iter().position(|m| m == model)
    }

    pub fn reversed(&self) -> Ranking {
        Ranking { order: self.order.iter().rev().cloned().collect() }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Fraction of unordered model pairs that two rankings place in the same
/// relative order: 1 means identical, 0 means exactly reversed.
///
/// Fewer than two models leaves no pairs to disagree on, so the rankings
/// are vacuously consistent.
pub fn ranking_consistency(a: &Ranking, b: &Ranking) -> Result<f64, MetricsError> {
    let set_a: BTreeSet<&ModelId> = a.order.iter().collect();
    let set_b: BTreeSet<&ModelId> = b.order.iter().collect();
    if set_a != set_b {
        return Err(MetricsError::MismatchedModels);
    }
    let n = a.len();
    if n < 2 {
        return Ok(1.0);
    }
    let mut concordant = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (&a.order[i], &a.order[j]);
            if b.position(x).unwrap() < b.position(y).unwrap() {
                concordant += 1;
            }
        }
    }
    Ok(concordant as f64 / (n * (n - 1) / 2) as f64)
}

/// Mean pairwise consistency across every pair of rankings: the stability
/// of a rating method over repeated runs.
pub fn multi_run_consistency(rankings: &[Ranking]) -> Result<f64, MetricsError> {
    if rankings.len() < 2 {
        return Err(MetricsError::TooFewRankings { needed: 2, got: rankings.len() });
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..rankings.len() {
        for j in i + 1..rankings.len() {
            total += ranking_consistency(&rankings[i], &rankings[j])?;
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

/// Confusion counts and scores for flagging anomalous annotators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionOutcome {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Scores `abilities < epsilon` as an anomaly detector against the known
/// corrupted set.
///
/// With nothing flagged and nothing to flag the detector is perfect
/// (F1 = 1); with nothing flagged but real anomalies present it scores 0.
pub fn detection_f1(
    abilities: &AbilityVector,
    truth: &BTreeSet<AnnotatorId>,
    epsilon: f64,
) -> DetectionOutcome {
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    let mut tn = 0;
    for (annotator, value) in abilities.iter() {
        let flagged = value < epsilon;
        let anomalous = truth.contains(annotator);
        match (flagged, anomalous) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let precision = if tp + fp == 0 {
        if truth.is_empty() { 1.0 } else { 0.0 }
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    DetectionOutcome {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        true_negatives: tn,
        precision,
        recall,
        f1,
    }
}
