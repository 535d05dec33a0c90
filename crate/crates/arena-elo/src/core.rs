//! Core data model: identifiers, comparison records, datasets, and the
//! logistic win probability shared by every rating method.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{components, sigmoid};

/// Slope of the display-scale map `display = 1000 + (400 / ln 10) * value`.
pub const DISPLAY_SLOPE: f64 = 173.71779276130073;
/// Offset of the display-scale map.
pub const DISPLAY_OFFSET: f64 = 1000.0;

#[derive(Debug, Error, PartialEq)]
pub enum CoreError {
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("scale constant must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("outcome value must be exactly 0, 0.5, or 1, got {0}")]
    InvalidOutcome(f64),
    #[error("expected {expected} values for {got} ids")]
    LengthMismatch { expected: usize, got: usize },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
}

/// Opaque model identifier. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModelId(String);

/// Opaque annotator identifier. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnnotatorId(String);

macro_rules! id_impls {
    ($ty:ident) => {
        impl $ty {
            pub fn new(id: impl Into<String>) -> Self {
                $ty(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $ty {
            fn from(s: &str) -> Self {
                $ty(s.to_owned())
            }
        }

        impl From<String> for $ty {
            fn from(s: String) -> Self {
                $ty(s)
            }
        }
    };
}

id_impls!(ModelId);
id_impls!(AnnotatorId);

/// Result of one comparison, seen from the `first` side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    FirstWins,
    SecondWins,
    Tie,
}

impl Outcome {
    /// Score of the `first` model: win 1, loss 0, tie 0.5.
    pub fn value(self) -> f64 {
        match self {
            Outcome::FirstWins => 1.0,
            Outcome::SecondWins => 0.0,
            Outcome::Tie => 0.5,
        }
    }

    /// Outcome with the two sides exchanged.
    pub fn flipped(self) -> Self {
        match self {
            Outcome::FirstWins => Outcome::SecondWins,
            Outcome::SecondWins => Outcome::FirstWins,
            Outcome::Tie => Outcome::Tie,
        }
    }

    pub fn is_decisive(self) -> bool {
        !matches!(self, Outcome::Tie)
    }

    pub fn from_value(value: f64) -> Result<Self, CoreError> {
        if value == 1.0 {
            Ok(Outcome::FirstWins)
        } else if value == 0.0 {
            Ok(Outcome::SecondWins)
        } else if value == 0.5 {
            Ok(Outcome::Tie)
        } else {
            Err(CoreError::InvalidOutcome(value))
        }
    }
}

/// Positive slope of the logistic curve, in inverse rating units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleConstant(f64);

impl ScaleConstant {
    /// Natural units: one rating point is one logit.
    pub const NATURAL: ScaleConstant = ScaleConstant(1.0);

    pub fn new(c: f64) -> Result<Self, CoreError> {
        if c.is_finite() && c > 0.0 {
            Ok(ScaleConstant(c))
        } else {
            Err(CoreError::InvalidScale(c))
        }
    }

    /// Conventional arena scale `ln 10 / 400`: 400 points per decade of odds.
    pub fn classic() -> Self {
        ScaleConstant(std::f64::consts::LN_10 / 400.0)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for ScaleConstant {
    fn default() -> Self {
        ScaleConstant::NATURAL
    }
}

/// Probability that the rating-`r_i` side beats the rating-`r_j` side:
/// `1 / (1 + exp(-c (r_i - r_j)))`.
///
/// Extreme differences round to exactly 0 or 1 at f64 resolution; no
/// clamping is applied to the returned value.
pub fn win_prob(r_i: f64, r_j: f64, scale: ScaleConstant) -> Result<f64, CoreError> {
    for (what, value) in [("r_i", r_i), ("r_j", r_j)] {
        if !value.is_finite() {
            return Err(CoreError::NonFinite { what, value });
        }
    }
    Ok(sigmoid(scale.get() * (r_i - r_j)))
}

/// One pairwise comparison: `first` vs `second`, judged by `annotator`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub first: ModelId,
    pub second: ModelId,
    pub annotator: AnnotatorId,
    pub outcome: Outcome,
}

impl ComparisonRecord {
    pub fn new(
        first: impl Into<ModelId>,
        second: impl Into<ModelId>,
        annotator: impl Into<AnnotatorId>,
        outcome: Outcome,
    ) -> Self {
        ComparisonRecord {
            first: first.into(),
            second: second.into(),
            annotator: annotator.into(),
            outcome,
        }
    }
}

/// Validation findings for a dataset. `issues` are malformed records;
/// `warnings` flag well-formed but statistically awkward structure.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty() && self.warnings.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    SelfBattle { record: usize, model: ModelId },
    EmptyModelId { record: usize },
    EmptyAnnotatorId { record: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::SelfBattle { record, model } => {
                write!(f, "record {record}: self battle for model `{model}`")
            }
            ValidationIssue::EmptyModelId { record } => {
                write!(f, "record {record}: empty model id")
            }
            ValidationIssue::EmptyAnnotatorId { record } => {
                write!(f, "record {record}: empty annotator id")
            }
        }
    }
}

/// Win and tie counts between every ordered pair of models.
#[derive(Debug, Clone, PartialEq)]
pub struct WinMatrix {
    models: Vec<ModelId>,
    wins: Vec<Vec<u64>>,
    ties: Vec<Vec<u64>>,
}

impl WinMatrix {
    pub fn models(&self) -> &[ModelId] {
        &self.models
    }

    /// Number of decisive records where model `i` beat model `j`.
    pub fn wins(&self, i: usize, j: usize) -> u64 {
        self.wins[i][j]
    }

    /// Number of tied records between models `i` and `j` (symmetric).
    pub fn ties(&self, i: usize, j: usize) -> u64 {
        self.ties[i][j]
    }
}

/// A bag of comparison records plus the registries derived from them.
///
/// Records keep their ingestion order; batch reductions that must not
/// depend on that order use [`Dataset::indexed`] instead, which iterates
/// records in canonical order (sorted by first, second, annotator,
/// outcome, then ingestion index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "DatasetRepr", into = "DatasetRepr")]
pub struct Dataset {
    records: Vec<ComparisonRecord>,
    models: Vec<ModelId>,
    annotators: Vec<AnnotatorId>,
}

#[derive(Serialize, Deserialize)]
struct DatasetRepr {
    records: Vec<ComparisonRecord>,
}

impl From<DatasetRepr> for Dataset {
    fn from(repr: DatasetRepr) -> Self {
        Dataset::from_records(repr.records)
    }
}

impl From<Dataset> for DatasetRepr {
    fn from(data: Dataset) -> Self {
        DatasetRepr { records: data.records }
    }
}

impl Default for Dataset {
    fn default() -> Self {
        Dataset::from_records(Vec::new())
    }
}

impl Dataset {
    /// Builds a dataset, deriving sorted model and annotator registries
    /// from the records.
    pub fn from_records(records: Vec<ComparisonRecord>) -> Self {
        let mut models: Vec<ModelId> = Vec::new();
        let mut annotators: Vec<AnnotatorId> = Vec::new();
        for rec in &records {
            models.push(rec.first.clone());
            models.push(rec.second.clone());
            annotators.push(rec.annotator.clone());
        }
        models.sort_unstable();
        models.dedup();
        annotators.sort_unstable();
        annotators.dedup();
        Dataset { records, models, annotators }
    }

    pub fn records(&self) -> &[ComparisonRecord] {
        &self.records
    }

    /// Registered models, sorted.
    pub fn models(&self) -> &[ModelId] {
        &self.models
    }

    /// Registered annotators, sorted.
    pub fn annotators(&self) -> &[AnnotatorId] {
        &self.annotators
    }

    pub fn n_models(&self) -> usize {
        self.models.len()
    }

    pub fn n_annotators(&self) -> usize {
        self.annotators.len()
    }

    pub fn n_records(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn model_index(&self, id: &ModelId) -> Option<usize> {
        self.models.binary_search(id).ok()
    }

    pub fn annotator_index(&self, id: &AnnotatorId) -> Option<usize> {
        self.annotators.binary_search(id).ok()
    }

    /// Record count per registered annotator, aligned with [`annotators`].
    ///
    /// [`annotators`]: Dataset::annotators
    pub fn annotator_record_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.annotators.len()];
        for rec in &self.records {
            if let Some(k) = self.annotator_index(&rec.annotator) {
                counts[k] += 1;
            }
        }
        counts
    }

    /// Record count per registered model, aligned with [`models`].
    ///
    /// [`models`]: Dataset::models
    pub fn model_record_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.models.len()];
        for rec in &self.records {
            if let Some(i) = self.model_index(&rec.first) {
                counts[i] += 1;
            }
            if let Some(j) = self.model_index(&rec.second) {
                counts[j] += 1;
            }
        }
        counts
    }

    /// Report-only structural checks; never mutates or rejects.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (idx, rec) in self.records.iter().enumerate() {
            if rec.first.as_str().is_empty() || rec.second.as_str().is_empty() {
                report.issues.push(ValidationIssue::EmptyModelId { record: idx });
            }
            if rec.annotator.as_str().is_empty() {
                report.issues.push(ValidationIssue::EmptyAnnotatorId { record: idx });
            }
            if rec.first == rec.second {
                report.issues.push(ValidationIssue::SelfBattle {
                    record: idx,
                    model: rec.first.clone(),
                });
            }
        }
        if self.n_models() < 2 && !self.records.is_empty() {
            report
                .warnings
                .push(format!("only {} distinct model(s); ratings need at least 2", self.n_models()));
        }
        let (_, n_components) = self.model_components();
        if n_components > 1 {
            report.warnings.push(format!(
                "comparison graph has {n_components} components; ratings are only comparable within a component"
            ));
        }
        report
    }

    /// Keeps only records from annotators with at least `delta` records;
    /// registries are rebuilt from the survivors. Annotators that fall
    /// below the threshold re-enter once later data pushes them back over.
    pub fn filter_min_records(&self, delta: usize) -> Dataset {
        let counts: BTreeMap<&AnnotatorId, usize> =
            self.records.iter().fold(BTreeMap::new(), |mut acc, rec| {
                *acc.entry(&rec.annotator).or_insert(0) += 1;
                acc
            });
        let kept = self
            .records
            .iter()
            .filter(|rec| counts.get(&rec.annotator).copied().unwrap_or(0) >= delta)
            .cloned()
            .collect();
        Dataset::from_records(kept)
    }

    /// Decisive win counts per ordered model pair, with ties tallied
    /// separately in a symmetric matrix.
    pub fn win_matrix(&self) -> WinMatrix {
        let n = self.n_models();
        let mut wins = vec![vec![0u64; n]; n];
        let mut ties = vec![vec![0u64; n]; n];
        for rec in &self.records {
            let (Some(i), Some(j)) = (self.model_index(&rec.first), self.model_index(&rec.second))
            else {
                continue;
            };
            if i == j {
                continue;
            }
            match rec.outcome {
                Outcome::FirstWins => wins[i][j] += 1,
                Outcome::SecondWins => wins[j][i] += 1,
                Outcome::Tie => {
                    ties[i][j] += 1;
                    ties[j][i] += 1;
                }
            }
        }
        WinMatrix { models: self.models.clone(), wins, ties }
    }

    /// Component label per model index, plus the component count.
    pub(crate) fn model_components(&self) -> (Vec<usize>, usize) {
        let edges = self.records.iter().filter_map(|rec| {
            match (self.model_index(&rec.first), self.model_index(&rec.second)) {
                (Some(i), Some(j)) if i != j => Some((i, j)),
                _ => None,
            }
        });
        components(self.n_models(), edges)
    }

    /// Records as registry indices, in canonical order.
    ///
    /// The sort key is (first, second, annotator, outcome, ingestion
    /// index), which maps any permutation of the same multiset of records
    /// to the same sequence; reductions over it are bit-deterministic.
    pub(crate) fn indexed(&self) -> Indexed {
        let mut perm: Vec<usize> = (0..self.records.len()).collect();
        perm.sort_unstable_by(|&a, &b| {
            let ra = &self.records[a];
            let rb = &self.records[b];
            (&ra.first, &ra.second, &ra.annotator, outcome_rank(ra.outcome), a).cmp(&(
                &rb.first,
                &rb.second,
                &rb.annotator,
                outcome_rank(rb.outcome),
                b,
            ))
        });
        let recs = perm
            .into_iter()
            .map(|idx| {
                let rec = &self.records[idx];
                IndexedRecord {
                    i: self.model_index(&rec.first).expect("registry covers records") as u32,
                    j: self.model_index(&rec.second).expect("registry covers records") as u32,
                    k: self.annotator_index(&rec.annotator).expect("registry covers records") as u32,
                    w: rec.outcome.value(),
                }
            })
            .collect();
        Indexed {
            recs,
            n_models: self.n_models(),
            n_annotators: self.n_annotators(),
        }
    }
}

fn outcome_rank(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::SecondWins => 0,
        Outcome::Tie => 1,
        Outcome::FirstWins => 2,
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct IndexedRecord {
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub w: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Indexed {
    pub recs: Vec<IndexedRecord>,
    pub n_models: usize,
    #[allow(dead_code)]
    pub n_annotators: usize,
}

/// Per-model ratings keyed by a sorted model registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingVector {
    models: Vec<ModelId>,
    values: Vec<f64>,
}

/// Per-annotator discrimination abilities keyed by a sorted registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbilityVector {
    annotators: Vec<AnnotatorId>,
    values: Vec<f64>,
}

impl RatingVector {
    /// Pairs ids with values; ids are sorted internally and must be unique.
    pub fn new(models: Vec<ModelId>, values: Vec<f64>) -> Result<Self, CoreError> {
        let (models, values) = sorted_pairs(models, values)?;
        Ok(RatingVector { models, values })
    }

    /// `ids` must already be sorted and unique, `values` aligned.
    pub(crate) fn from_sorted(models: Vec<ModelId>, values: Vec<f64>) -> Self {
        debug_assert!(models.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(models.len(), values.len());
        RatingVector { models, values }
    }

    pub fn models(&self) -> &[ModelId] {
        &self.models
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn get(&self, id: &ModelId) -> Option<f64> {
        self.models.binary_search(id).ok().map(|idx| self.values[idx])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModelId, f64)> {
        self.models.iter().zip(self.values.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.values.iter().sum::<f64>() / self.values.len() as f64
        }
    }

    /// Affine display scale: `1000 + (400 / ln 10) * value`.
    pub fn to_display(&self) -> Vec<f64> {
        self.values.iter().map(|v| DISPLAY_OFFSET + DISPLAY_SLOPE * v).collect()
    }

    /// Min-max map onto `[0, 1]`; a zero-span vector maps to all 0.5.
    pub fn to_normalized(&self) -> Vec<f64> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let span = hi - lo;
        self.values
            .iter()
            .map(|&v| if span > 0.0 { (v - lo) / span } else { 0.5 })
            .collect()
    }
}

impl AbilityVector {
    /// Pairs ids with values; ids are sorted internally and must be unique.
    pub fn new(annotators: Vec<AnnotatorId>, values: Vec<f64>) -> Result<Self, CoreError> {
        let (annotators, values) = sorted_pairs(annotators, values)?;
        Ok(AbilityVector { annotators, values })
    }

    pub(crate) fn from_sorted(annotators: Vec<AnnotatorId>, values: Vec<f64>) -> Self {
        debug_assert!(annotators.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(annotators.len(), values.len());
        AbilityVector { annotators, values }
    }

    pub fn annotators(&self) -> &[AnnotatorId] {
        &self.annotators
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.annotators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annotators.is_empty()
    }

    pub fn get(&self, id: &AnnotatorId) -> Option<f64> {
        self.annotators.binary_search(id).ok().map(|idx| self.values[idx])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AnnotatorId, f64)> {
        self.annotators.iter().zip(self.values.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

fn sorted_pairs<I: Ord + Clone + fmt::Display>(
    ids: Vec<I>,
    values: Vec<f64>,
) -> Result<(Vec<I>, Vec<f64>), CoreError> {
    if ids.len() != values.len() {
        return Err(CoreError::LengthMismatch { expected: ids.len(), got: values.len() });
    }
    let mut pairs: Vec<(I, f64)> = ids.into_iter().zip(values).collect();
    pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(CoreError::DuplicateId(w[0].0.to_string()));
        }
    }
    Ok(pairs.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rec(first: &str, second: &str, annotator: &str, outcome: Outcome) -> ComparisonRecord {
        ComparisonRecord::new(first, second, annotator, outcome)
    }

    #[test]
    fn win_prob_classic_200_point_gap() {
        let p = win_prob(1200.0, 1000.0, ScaleConstant::classic()).unwrap();
        assert_abs_diff_eq!(p, 0.7597469266479578, epsilon = 1e-12);
    }

    #[test]
    fn win_prob_equal_ratings_is_half() {
        assert_eq!(win_prob(3.0, 3.0, ScaleConstant::NATURAL).unwrap(), 0.5);
    }

    #[test]
    fn win_prob_rejects_non_finite() {
        assert!(matches!(
            win_prob(f64::NAN, 0.0, ScaleConstant::NATURAL),
            Err(CoreError::NonFinite { what: "r_i", .. })
        ));
        assert!(matches!(
            win_prob(0.0, f64::INFINITY, ScaleConstant::NATURAL),
            Err(CoreError::NonFinite { what: "r_j", .. })
        ));
    }

    #[test]
    fn scale_constant_rejects_bad_values() {
        assert!(ScaleConstant::new(0.0).is_err());
        assert!(ScaleConstant::new(-1.0).is_err());
        assert!(ScaleConstant::new(f64::NAN).is_err());
        assert!(ScaleConstant::new(2.5).is_ok());
    }

    #[test]
    fn outcome_round_trip_and_flip() {
        for o in [Outcome::FirstWins, Outcome::SecondWins, Outcome::Tie] {
            assert_eq!(Outcome::from_value(o.value()).unwrap(), o);
            assert_eq!(o.flipped().flipped(), o);
        }
        assert!(Outcome::from_value(0.4).is_err());
        assert_eq!(Outcome::Tie.flipped(), Outcome::Tie);
    }

    #[test]
    fn registries_are_sorted_and_deduped() {
        let data = Dataset::from_records(vec![
            rec("b", "a", "k2", Outcome::FirstWins),
            rec("a", "c", "k1", Outcome::Tie),
            rec("b", "c", "k1", Outcome::SecondWins),
        ]);
        assert_eq!(data.models(), &["a".into(), "b".into(), "c".into()]);
        assert_eq!(data.annotators(), &["k1".into(), "k2".into()]);
        assert_eq!(data.model_index(&"c".into()), Some(2));
        assert_eq!(data.annotator_index(&"k9".into()), None);
    }

    #[test]
    fn validate_reports_self_battle() {
        let data = Dataset::from_records(vec![rec("a", "a", "k", Outcome::FirstWins)]);
        let report = data.validate();
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::SelfBattle { record: 0, .. })));
    }

    #[test]
    fn validate_flags_disconnected_graph() {
        let data = Dataset::from_records(vec![
            rec("a", "b", "k", Outcome::FirstWins),
            rec("c", "d", "k", Outcome::FirstWins),
        ]);
        let report = data.validate();
        assert!(report.issues.is_empty());
        assert_eq!(report.warnings.len(), 1);
        assert!(report.warnings[0].contains("2 components"));
    }

    #[test]
    fn validate_clean_on_connected_data() {
        let data = Dataset::from_records(vec![
            rec("a", "b", "k", Outcome::FirstWins),
            rec("b", "c", "k", Outcome::Tie),
        ]);
        assert!(data.validate().is_clean());
    }

    #[test]
    fn filter_keeps_annotators_at_or_above_delta() {
        let mut records = Vec::new();
        for (ann, count) in [("k60", 60), ("k50", 50), ("k10", 10)] {
            for i in 0..count {
                let (a, b) = if i % 2 == 0 { ("a", "b") } else { ("b", "a") };
                records.push(rec(a, b, ann, Outcome::FirstWins));
            }
        }
        let data = Dataset::from_records(records);
        let kept = data.filter_min_records(50);
        assert_eq!(kept.n_records(), 110);
        assert_eq!(kept.annotators(), &["k50".into(), "k60".into()]);
        assert_eq!(data.filter_min_records(0), data);
    }

    #[test]
    fn filter_is_idempotent() {
        let data = Dataset::from_records(vec![
            rec("a", "b", "k1", Outcome::FirstWins),
            rec("a", "b", "k1", Outcome::SecondWins),
            rec("b", "a", "k2", Outcome::Tie),
        ]);
        let once = data.filter_min_records(2);
        assert_eq!(once.filter_min_records(2), once);
    }

    #[test]
    fn win_matrix_counts_wins_to_the_winner() {
        let data = Dataset::from_records(vec![
            rec("a", "b", "k", Outcome::FirstWins),
            rec("a", "b", "k", Outcome::SecondWins),
            rec("b", "a", "k", Outcome::FirstWins),
            rec("a", "b", "k", Outcome::Tie),
        ]);
        let wm = data.win_matrix();
        let (a, b) = (0, 1);
        assert_eq!(wm.wins(a, b), 1);
        assert_eq!(wm.wins(b, a), 2);
        assert_eq!(wm.ties(a, b), 1);
        assert_eq!(wm.ties(b, a), 1);
    }

    #[test]
    fn empty_dataset_yields_empty_matrix() {
        let wm = Dataset::default().win_matrix();
        assert!(wm.models().is_empty());
    }

    #[test]
    fn display_and_normalized_scales() {
        let rv = RatingVector::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![-1.0, 0.0, 3.0],
        )
        .unwrap();
        let display = rv.to_display();
        assert_abs_diff_eq!(display[1], 1000.0, epsilon = 1e-12);
        let value = 100.0 * std::f64::consts::LN_10 / 400.0;
        let rv2 = RatingVector::new(vec!["x".into()], vec![value]).unwrap();
        assert_abs_diff_eq!(rv2.to_display()[0], 1100.0, epsilon = 1e-9);
        assert_eq!(rv.to_normalized(), vec![0.0, 0.25, 1.0]);
        let flat = RatingVector::new(vec!["a".into(), "b".into()], vec![2.0, 2.0]).unwrap();
        assert_eq!(flat.to_normalized(), vec![0.5, 0.5]);
    }

    #[test]
    fn rating_vector_rejects_duplicates_and_mismatch() {
        assert!(matches!(
            RatingVector::new(vec!["a".into(), "a".into()], vec![0.0, 1.0]),
            Err(CoreError::DuplicateId(_))
        ));
        assert!(matches!(
            RatingVector::new(vec!["a".into()], vec![0.0, 1.0]),
            Err(CoreError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn dataset_serde_round_trip() {
        let data = Dataset::from_records(vec![
            rec("a", "b", "k1", Outcome::FirstWins),
            rec("b", "c", "k2", Outcome::Tie),
        ]);
        let json = serde_json::to_string(&data).unwrap();
        let back: Dataset = serde_json::from_str(&json).unwrap();
        assert_eq!(back, data);
    }

    proptest! {
        #[test]
        fn win_prob_sides_sum_to_one(
            r_i in -2000.0f64..2000.0,
            r_j in -2000.0f64..2000.0,
            c in 1e-3f64..2.0,
        ) {
            let scale = ScaleConstant::new(c).unwrap();
            let p = win_prob(r_i, r_j, scale).unwrap();
            let q = win_prob(r_j, r_i, scale).unwrap();
            prop_assert!((p + q - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn win_prob_translation_invariant_on_integers(
            r_i in -500i32..500,
            r_j in -500i32..500,
            t in -1000i32..1000,
        ) {
            // Integer-valued f64 arithmetic is exact here, so invariance
            // holds bitwise.
            let scale = ScaleConstant::NATURAL;
            let p = win_prob(r_i as f64, r_j as f64, scale).unwrap();
            let q = win_prob((r_i + t) as f64, (r_j + t) as f64, scale).unwrap();
            prop_assert_eq!(p, q);
        }

        #[test]
        fn win_prob_monotone_in_first_rating(
            lo in -30.0f64..30.0,
            bump in 1e-6f64..10.0,
            r_j in -30.0f64..30.0,
        ) {
            let scale = ScaleConstant::NATURAL;
            let p_lo = win_prob(lo, r_j, scale).unwrap();
            let p_hi = win_prob(lo + bump, r_j, scale).unwrap();
            prop_assert!(p_hi >= p_lo);
        }

        #[test]
        fn filter_total_order_invariance(perm_seed in 0u64..1000) {
            let mut records = vec![
                rec("a", "b", "k1", Outcome::FirstWins),
                rec("b", "c", "k1", Outcome::SecondWins),
                rec("a", "c", "k2", Outcome::Tie),
                rec("c", "a", "k2", Outcome::FirstWins),
                rec("b", "a", "k3", Outcome::FirstWins),
            ];
            crate::numeric::fisher_yates(&mut records, &mut crate::numeric::stream_rng(perm_seed, 0));
            let data = Dataset::from_records(records);
            let filtered = data.filter_min_records(2);
            prop_assert_eq!(filtered.annotators(), &["k1".into(), "k2".into()]);
            prop_assert_eq!(filtered.n_records(), 4);
        }
    }
}
