//! Batch maximum-likelihood ratings.
//!
//! Models every comparison independently with the logistic win
//! probability and maximizes
//!
//! ```text
//! ln L(R) = sum over records  W * ln P(r_i, r_j) + (1 - W) * ln P(r_j, r_i)
//! ```
//!
//! The likelihood only depends on rating differences, so the solution is
//! pinned by re-centering each connected component to mean zero. On that
//! quotient the objective is strictly concave (the Hessian is a negated
//! graph Laplacian), which is what licenses [`fit_newton`]. All record
//! reductions run in canonical order: permuting the input records changes
//! nothing, bit for bit.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{Dataset, IndexedRecord, ModelId, RatingVector, ScaleConstant};
use crate::numeric::{log_prob_clamped, sigmoid, stream_rng};

/// Fits abort once any rating drifts this many natural units from zero;
/// with separable data the MLE does not exist and the ratings run away.
pub const DIVERGENCE_BOUND: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    /// Step size applied to the per-record mean gradient.
    pub learning_rate: f64,
    /// Epoch cap; one epoch is one full-batch update.
    pub epochs: usize,
    /// Early-stop threshold on the max-norm of the per-record mean
    /// gradient.
    pub grad_tol: f64,
    /// Weight of an optional `-ridge * ||R||^2` penalty. Zero by default;
    /// a positive value restores a finite optimum on separable data.
    pub ridge: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            learning_rate: 0.1,
            epochs: 2000,
            grad_tol: 1e-8,
            ridge: 0.0,
        }
    }
}

/// Output of a batch fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Mean-zero per component.
    pub ratings: RatingVector,
    /// Negative log-likelihood after each completed epoch.
    pub loss_trace: Vec<f64>,
    /// Whether `grad_tol` was reached before the epoch cap.
    pub converged: bool,
    /// Final mean-gradient max-norm.
    pub grad_norm: f64,
    pub warnings: Vec<String>,
}

/// Mean-centered ratings captured during a fit, aligned with the
/// dataset's model registry.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSnapshot {
    pub epoch: usize,
    pub ratings: Vec<f64>,
}

/// Initial point of a gradient fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitPolicy {
    Zeros,
    /// Ratings drawn uniformly from (-0.25, 0.25).
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GdOptions {
    pub init: InitPolicy,
    /// Record a snapshot every this many epochs; 0 disables snapshots.
    pub snapshot_every: usize,
}

impl Default for GdOptions {
    fn default() -> Self {
        GdOptions { init: InitPolicy::Zeros, snapshot_every: 0 }
    }
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least 2 models, dataset has {0}")]
    TooFewModels(usize),
    #[error("no rating supplied for model `{0}`")]
    MissingModel(ModelId),
    #[error("no ability supplied for annotator `{0}`")]
    MissingAnnotator(crate::core::AnnotatorId),
    #[error("loss became non-finite at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error(
        "rating for `{model}` passed {bound} natural units at epoch {epoch}; \
         the data are separable and the unpenalized MLE does not exist \
         (a positive ridge restores it)"
    )]
    Separable { epoch: usize, model: ModelId, bound: f64 },
    #[error(
        "restricted Hessian is singular: the comparison graph has {components} \
         components; fit each component independently"
    )]
    SingularHessian { components: usize },
    #[error("ability sum {sum} is too close to zero to normalize")]
    DegenerateAbilities { sum: f64 },
}

/// Log-likelihood of `ratings` on `data` (sum over records).
///
/// Probabilities are clamped to `[1e-12, 1 - 1e-12]` inside the
/// logarithms, so the result is finite for any finite ratings.
pub fn log_likelihood(
    ratings: &RatingVector,
    data: &Dataset,
    scale: ScaleConstant,
) -> Result<f64, FitError> {
    let r = pull_ratings(ratings, data)?;
    let indexed = data.indexed();
    Ok(-neg_log_likelihood(&indexed.recs, &r, scale.get()))
}

/// Gradient of the log-likelihood, aligned with `data.models()`:
/// component n is `sum over records involving n of c * (W - P)`.
pub fn gradient(
    ratings: &RatingVector,
    data: &Dataset,
    scale: ScaleConstant,
) -> Result<Vec<f64>, FitError> {
    let r = pull_ratings(ratings, data)?;
    let indexed = data.indexed();
    let mut grad = vec![0.0; data.n_models()];
    accumulate_gradient(&indexed.recs, &r, scale.get(), &mut grad);
    Ok(grad)
}

/// Hessian of the log-likelihood: a negated weighted graph Laplacian with
/// edge weights `c^2 P (1 - P)` summed per record.
pub fn hessian(
    ratings: &RatingVector,
    data: &Dataset,
    scale: ScaleConstant,
) -> Result<DMatrix<f64>, FitError> {
    let r = pull_ratings(ratings, data)?;
    let indexed = data.indexed();
    let c = scale.get();
    let n = data.n_models();
    let mut h = DMatrix::zeros(n, n);
    for rec in &indexed.recs {
        let (i, j) = (rec.i as usize, rec.j as usize);
        let p = sigmoid(c * (r[i] - r[j]));
        let a = c * c * p * (1.0 - p);
        h[(i, i)] -= a;
        h[(j, j)] -= a;
        h[(i, j)] += a;
        h[(j, i)] += a;
    }
    Ok(h)
}

/// Full-batch gradient ascent from the all-zeros start.
pub fn fit_gd(data: &Dataset, cfg: &OptimConfig, scale: ScaleConstant) -> Result<FitResult, FitError> {
    fit_gd_with(data, cfg, scale, &GdOptions::default()).map(|(result, _)| result)
}

/// Gradient ascent with an explicit init policy and optional per-epoch
/// snapshots.
pub fn fit_gd_with(
    data: &Dataset,
    cfg: &OptimConfig,
    scale: ScaleConstant,
    opts: &GdOptions,
) -> Result<(FitResult, Vec<EpochSnapshot>), FitError> {
    let indexed = data.indexed();
    let n = indexed.n_models;
    if n < 2 {
        return Err(FitError::TooFewModels(n));
    }
    let c = scale.get();
    let s = indexed.recs.len() as f64;
    let (labels, n_components) = data.model_components();
    let mut warnings = Vec::new();
    if n_components > 1 {
        warnings.push(format!(
            "comparison graph has {n_components} components; each is centered independently and cross-component differences are meaningless"
        ));
    }
    if cfg.ridge == 0.0 {
        separability_warnings(&indexed.recs, data.models(), &mut warnings);
    }

    let mut r = match opts.init {
        InitPolicy::Zeros => vec![0.0; n],
        InitPolicy::Seeded(seed) => {
            let mut rng = stream_rng(seed, 0);
            (0..n).map(|_| rng.gen_range(-0.25..0.25)).collect()
        }
    };
    let mut grad = vec![0.0; n];
    let mut trace = Vec::new();
    let mut snapshots = Vec::new();
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;

    for epoch in 0..=cfg.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let loss = accumulate_gradient(&indexed.recs, &r, c, &mut grad);
        if !loss.is_finite() {
            return Err(FitError::Diverged { epoch });
        }
        if cfg.ridge > 0.0 {
            for i in 0..n {
                grad[i] -= 2.0 * cfg.ridge * r[i];
            }
        }
        if epoch > 0 {
            trace.push(loss);
        }
        grad_norm = max_abs(&grad) / s;
        if grad_norm <= cfg.grad_tol {
            converged = true;
            break;
        }
        if epoch == cfg.epochs {
            break;
        }
        let step = cfg.learning_rate / s;
        for i in 0..n {
            r[i] += step * grad[i];
        }
        check_bounds(&r, data, c, epoch)?;
        if opts.snapshot_every > 0 && (epoch + 1) % opts.snapshot_every == 0 {
            snapshots.push(EpochSnapshot {
                epoch: epoch + 1,
                ratings: centered(&r, &labels, n_components),
            });
        }
    }

    let values = centered(&r, &labels, n_components);
    Ok((
        FitResult {
            ratings: RatingVector::from_sorted(data.models().to_vec(), values),
            loss_trace: trace,
            converged,
            grad_norm,
            warnings,
        },
        snapshots,
    ))
}

/// Newton's method on the anchored subspace (first model's rating held at
/// zero during solves), with backtracking so the loss never increases.
///
/// Requires a connected comparison graph unless `ridge > 0`; otherwise the
/// restricted Hessian is singular and the fit reports which components to
/// split.
pub fn fit_newton(
    data: &Dataset,
    cfg: &OptimConfig,
    scale: ScaleConstant,
) -> Result<FitResult, FitError> {
    let indexed = data.indexed();
    let n = indexed.n_models;
    if n < 2 {
        return Err(FitError::TooFewModels(n));
    }
    let c = scale.get();
    let s = indexed.recs.len() as f64;
    let (labels, n_components) = data.model_components();
    if n_components > 1 && cfg.ridge == 0.0 {
        return Err(FitError::SingularHessian { components: n_components });
    }
    let mut warnings = Vec::new();
    if n_components > 1 {
        warnings.push(format!(
            "comparison graph has {n_components} components; each is centered independently and cross-component differences are meaningless"
        ));
    }
    if cfg.ridge == 0.0 {
        separability_warnings(&indexed.recs, data.models(), &mut warnings);
    }

    let mut r = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;
    let mut loss = f64::INFINITY;

    for epoch in 0..=cfg.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        loss = accumulate_gradient(&indexed.recs, &r, c, &mut grad);
        if !loss.is_finite() {
            return Err(FitError::Diverged { epoch });
        }
        if cfg.ridge > 0.0 {
            for i in 0..n {
                grad[i] -= 2.0 * cfg.ridge * r[i];
            }
        }
        grad_norm = max_abs(&grad) / s;
        if grad_norm <= cfg.grad_tol {
            converged = true;
            break;
        }
        if epoch == cfg.epochs {
            break;
        }

        // Solve (-H + 2 ridge I) dr = grad on the anchored coordinates;
        // -H restricted to them is positive definite exactly when the
        // graph is connected.
        let mut a = DMatrix::zeros(n - 1, n - 1);
        for rec in &indexed.recs {
            let (i, j) = (rec.i as usize, rec.j as usize);
            let p = sigmoid(c * (r[i] - r[j]));
            let weight = c * c * p * (1.0 - p);
            if i > 0 {
                a[(i - 1, i - 1)] += weight;
            }
            if j > 0 {
                a[(j - 1, j - 1)] += weight;
            }
            if i > 0 && j > 0 {
                a[(i - 1, j - 1)] -= weight;
                a[(j - 1, i - 1)] -= weight;
            }
        }
        if cfg.ridge > 0.0 {
            for d in 0..n - 1 {
                a[(d, d)] += 2.0 * cfg.ridge;
            }
        }
        let rhs = DVector::from_iterator(n - 1, grad[1..].iter().copied());
        let step = Cholesky::new(a)
            .ok_or(FitError::SingularHessian { components: n_components })?
            .solve(&rhs);

        let penalized = |r: &[f64]| {
            neg_log_likelihood(&indexed.recs, r, c)
                + cfg.ridge * r.iter().map(|v| v * v).sum::<f64>()
        };
        let current = penalized(&r);
        let mut t = 1.0;
        let mut candidate = r.clone();
        let mut accepted = false;
        for _ in 0..40 {
            for i in 1..n {
                candidate[i] = r[i] + t * step[i - 1];
            }
            if penalized(&candidate) <= current {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            warnings.push(format!("line search stalled at epoch {epoch}; stopping early"));
            break;
        }
        r.copy_from_slice(&candidate);
        check_bounds(&r, data, c, epoch)?;
        trace.push(neg_log_likelihood(&indexed.recs, &r, c));
    }
    let _ = loss;

    let values = centered(&r, &labels, n_components);
    Ok(FitResult {
        ratings: RatingVector::from_sorted(data.models().to_vec(), values),
        loss_trace: trace,
        converged,
        grad_norm,
        warnings,
    })
}

/// Negative log-likelihood (clamped logs), canonical-order reduction.
pub(crate) fn neg_log_likelihood(recs: &[IndexedRecord], r: &[f64], c: f64) -> f64 {
    let mut loss = 0.0;
    for rec in recs {
        let x = c * (r[rec.i as usize] - r[rec.j as usize]);
        loss -= rec.w * log_prob_clamped(x) + (1.0 - rec.w) * log_prob_clamped(-x);
    }
    loss
}

/// Adds the sum-form gradient into `grad` and returns the negative
/// log-likelihood from the same pass.
fn accumulate_gradient(recs: &[IndexedRecord], r: &[f64], c: f64, grad: &mut [f64]) -> f64 {
    let mut loss = 0.0;
    for rec in recs {
        let (i, j) = (rec.i as usize, rec.j as usize);
        let x = c * (r[i] - r[j]);
        let p = sigmoid(x);
        let t = c * (rec.w - p);
        grad[i] += t;
        grad[j] -= t;
        loss -= rec.w * log_prob_clamped(x) + (1.0 - rec.w) * log_prob_clamped(-x);
    }
    loss
}

fn check_bounds(r: &[f64], data: &Dataset, c: f64, epoch: usize) -> Result<(), FitError> {
    let bound = DIVERGENCE_BOUND / c;
    for (idx, &value) in r.iter().enumerate() {
        if !value.is_finite() || value.abs() > bound {
            return Err(FitError::Separable {
                epoch,
                model: data.models()[idx].clone(),
                bound: DIVERGENCE_BOUND,
            });
        }
    }
    Ok(())
}

/// Subtracts each component's mean.
pub(crate) fn centered(r: &[f64], labels: &[usize], n_components: usize) -> Vec<f64> {
    let mut sum = vec![0.0f64; n_components];
    let mut count = vec![0usize; n_components];
    for (idx, &value) in r.iter().enumerate() {
        sum[labels[idx]] += value;
        count[labels[idx]] += 1;
    }
    r.iter()
        .enumerate()
        .map(|(idx, &value)| value - sum[labels[idx]] / count[labels[idx]] as f64)
        .collect()
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Warns about models that never lose (or never win): their unpenalized
/// MLE rating is unbounded, so a fit can only stop at the epoch cap, the
/// gradient tolerance, or the divergence bound.
pub(crate) fn separability_warnings(
    recs: &[IndexedRecord],
    models: &[ModelId],
    warnings: &mut Vec<String>,
) {
    let n = models.len();
    let mut best = vec![0.0f64; n];
    let mut worst = vec![1.0f64; n];
    let mut seen = vec![false; n];
    for rec in recs {
        let (i, j) = (rec.i as usize, rec.j as usize);
        seen[i] = true;
        seen[j] = true;
        worst[i] = worst[i].min(rec.w);
        best[i] = best[i].max(rec.w);
        worst[j] = worst[j].min(1.0 - rec.w);
        best[j] = best[j].max(1.0 - rec.w);
    }
    for idx in 0..n {
        if !seen[idx] {
            continue;
        }
        if worst[idx] == 1.0 {
            warnings.push(format!(
                "model `{}` wins every recorded comparison; its unpenalized MLE rating is unbounded",
                models[idx]
            ));
        } else if best[idx] == 0.0 {
            warnings.push(format!(
                "model `{}` loses every recorded comparison; its unpenalized MLE rating is unbounded",
                models[idx]
            ));
        }
    }
}

/// Maps the dataset's models onto `ratings`, erroring on any model the
/// rating vector does not cover.
fn pull_ratings(ratings: &RatingVector, data: &Dataset) -> Result<Vec<f64>, FitError> {
    data.models()
        .iter()
        .map(|m| ratings.get(m).ok_or_else(|| FitError::MissingModel(m.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{ComparisonRecord, Outcome};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rec(first: &str, second: &str, outcome: Outcome) -> ComparisonRecord {
        ComparisonRecord::new(first, second, "k", outcome)
    }

    fn ratings(pairs: &[(&str, f64)]) -> RatingVector {
        RatingVector::new(
            pairs.iter().map(|(m, _)| ModelId::new(*m)).collect(),
            pairs.iter().map(|(_, v)| *v).collect(),
        )
        .unwrap()
    }

    fn two_player(wins: usize, losses: usize) -> Dataset {
        let mut records = Vec::new();
        for _ in 0..wins {
            records.push(rec("a", "b", Outcome::FirstWins));
        }
        for _ in 0..losses {
            records.push(rec("a", "b", Outcome::SecondWins));
        }
        Dataset::from_records(records)
    }

    #[test]
    fn single_record_likelihood_at_equal_ratings() {
        let data = Dataset::from_records(vec![rec("a", "b", Outcome::FirstWins)]);
        let rv = ratings(&[("a", 0.0), ("b", 0.0)]);
        let ll = log_likelihood(&rv, &data, ScaleConstant::NATURAL).unwrap();
        assert_abs_diff_eq!(ll, (0.5f64).ln(), epsilon = 1e-15);
    }

    #[test]
    fn empty_dataset_likelihood_is_zero() {
        let rv = ratings(&[]);
        assert_eq!(log_likelihood(&rv, &Dataset::default(), ScaleConstant::NATURAL).unwrap(), 0.0);
    }

    #[test]
    fn likelihood_requires_covering_ratings() {
        let data = Dataset::from_records(vec![rec("a", "b", Outcome::FirstWins)]);
        let rv = ratings(&[("a", 0.0)]);
        assert!(matches!(
            log_likelihood(&rv, &data, ScaleConstant::NATURAL),
            Err(FitError::MissingModel(m)) if m.as_str() == "b"
        ));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = Dataset::from_records(vec![
            rec("a", "b", Outcome::FirstWins),
            rec("b", "c", Outcome::Tie),
            rec("a", "c", Outcome::SecondWins),
            rec("c", "a", Outcome::FirstWins),
        ]);
        let scale = ScaleConstant::new(0.7).unwrap();
        let base = [0.3, -0.2, 0.5];
        let rv = ratings(&[("a", base[0]), ("b", base[1]), ("c", base[2])]);
        let grad = gradient(&rv, &data, scale).unwrap();
        let h = 1e-5;
        for idx in 0..3 {
            let mut lo = base;
            let mut hi = base;
            lo[idx] -= h;
            hi[idx] += h;
            let ll = |vals: [f64; 3]| {
                let rv = ratings(&[("a", vals[0]), ("b", vals[1]), ("c", vals[2])]);
                log_likelihood(&rv, &data, scale).unwrap()
            };
            let fd = (ll(hi) - ll(lo)) / (2.0 * h);
            assert_abs_diff_eq!(grad[idx], fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn gradient_components_sum_to_zero() {
        let data = Dataset::from_records(vec![
            rec("a", "b", Outcome::FirstWins),
            rec("b", "c", Outcome::SecondWins),
            rec("c", "a", Outcome::Tie),
        ]);
        let rv = ratings(&[("a", 1.0), ("b", -0.5), ("c", 0.2)]);
        let grad = gradient(&rv, &data, ScaleConstant::NATURAL).unwrap();
        assert_abs_diff_eq!(grad.iter().sum::<f64>(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hessian_single_record_at_equal_ratings() {
        let data = Dataset::from_records(vec![rec("a", "b", Outcome::FirstWins)]);
        let rv = ratings(&[("a", 0.0), ("b", 0.0)]);
        let h = hessian(&rv, &data, ScaleConstant::NATURAL).unwrap();
        assert_eq!(h[(0, 0)], -0.25);
        assert_eq!(h[(1, 1)], -0.25);
        assert_eq!(h[(0, 1)], 0.25);
        assert_eq!(h[(1, 0)], 0.25);
    }

    #[test]
    fn hessian_rows_sum_to_zero_and_symmetric() {
        let data = Dataset::from_records(vec![
            rec("a", "b", Outcome::FirstWins),
            rec("b", "c", Outcome::SecondWins),
            rec("a", "c", Outcome::Tie),
        ]);
        let rv = ratings(&[("a", 0.4), ("b", -0.1), ("c", 0.9)]);
        let h = hessian(&rv, &data, ScaleConstant::new(1.3).unwrap()).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(h.row(i).sum(), 0.0, epsilon = 1e-12);
            for j in 0..3 {
                assert_eq!(h[(i, j)], h[(j, i)]);
            }
        }
    }

    #[test]
    fn gd_recovers_two_to_one_odds() {
        let data = two_player(2, 1);
        let fit = fit_gd(&data, &OptimConfig::default(), ScaleConstant::NATURAL).unwrap();
        let diff = fit.ratings.get(&"a".into()).unwrap() - fit.ratings.get(&"b".into()).unwrap();
        assert_abs_diff_eq!(diff, (2.0f64).ln(), epsilon = 1e-4);
        assert_abs_diff_eq!(fit.ratings.mean(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn newton_matches_closed_form_quickly() {
        let data = two_player(2, 1);
        let fit = fit_newton(&data, &OptimConfig::default(), ScaleConstant::NATURAL).unwrap();
        let diff = fit.ratings.get(&"a".into()).unwrap() - fit.ratings.get(&"b".into()).unwrap();
        assert_abs_diff_eq!(diff, (2.0f64).ln(), epsilon = 1e-6);
        assert!(fit.converged);
        assert!(fit.loss_trace.len() <= 20);
        for w in fit.loss_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn newton_zero_gradient_start_takes_no_step() {
        // Perfectly balanced data: the zero init is already the optimum.
        let data = two_player(1, 1);
        let fit = fit_newton(&data, &OptimConfig::default(), ScaleConstant::NATURAL).unwrap();
        assert!(fit.converged);
        assert_eq!(fit.ratings.values(), &[0.0, 0.0]);
        assert!(fit.loss_trace.is_empty());
    }

    #[test]
    fn runaway_ratings_trip_divergence_bound() {
        let data = two_player(12, 0);
        let cfg = OptimConfig { learning_rate: 5000.0, ..OptimConfig::default() };
        let err = fit_gd(&data, &cfg, ScaleConstant::NATURAL).unwrap_err();
        assert!(matches!(err, FitError::Separable { .. }));
    }

    #[test]
    fn separable_data_warns_on_tolerance_stop() {
        // At the default tolerance the gradient saturates before the bound
        // is reached; the fit must still say the MLE is unbounded.
        let data = two_player(12, 0);
        let fit = fit_newton(&data, &OptimConfig::default(), ScaleConstant::NATURAL).unwrap();
        assert!(fit.warnings.iter().any(|w| w.contains("unbounded")));
        let fit = fit_gd(&data, &OptimConfig::default(), ScaleConstant::NATURAL).unwrap();
        assert!(!fit.converged);
        assert!(fit.warnings.iter().any(|w| w.contains("unbounded")));
    }

    #[test]
    fn ridge_restores_separable_fit() {
        let data = two_player(12, 0);
        let cfg = OptimConfig { ridge: 0.05, ..OptimConfig::default() };
        let fit = fit_gd(&data, &cfg, ScaleConstant::NATURAL).unwrap();
        let diff = fit.ratings.get(&"a".into()).unwrap() - fit.ratings.get(&"b".into()).unwrap();
        assert!(diff.is_finite() && diff > 0.0);
    }

    #[test]
    fn newton_rejects_disconnected_graph() {
        let data = Dataset::from_records(vec![
            rec("a", "b", Outcome::FirstWins),
            rec("c", "d", Outcome::SecondWins),
        ]);
        let err = fit_newton(&data, &OptimConfig::default(), ScaleConstant::NATURAL).unwrap_err();
        assert!(matches!(err, FitError::SingularHessian { components: 2 }));
    }

    #[test]
    fn gd_warns_and_centers_per_component() {
        let data = Dataset::from_records(vec![
            rec("a", "b", Outcome::FirstWins),
            rec("a", "b", Outcome::SecondWins),
            rec("a", "b", Outcome::FirstWins),
            rec("c", "d", Outcome::FirstWins),
            rec("c", "d", Outcome::SecondWins),
        ]);
        let fit = fit_gd(&data, &OptimConfig::default(), ScaleConstant::NATURAL).unwrap();
        assert_eq!(fit.warnings.len(), 1);
        let v = fit.ratings;
        let ab = v.get(&"a".into()).unwrap() + v.get(&"b".into()).unwrap();
        let cd = v.get(&"c".into()).unwrap() + v.get(&"d".into()).unwrap();
        assert_abs_diff_eq!(ab, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cd, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fit_needs_two_models() {
        assert!(matches!(
            fit_gd(&Dataset::default(), &OptimConfig::default(), ScaleConstant::NATURAL),
            Err(FitError::TooFewModels(0))
        ));
    }

    #[test]
    fn loss_trace_has_one_entry_per_epoch() {
        let data = two_player(3, 2);
        let cfg = OptimConfig { epochs: 7, grad_tol: 0.0, ..OptimConfig::default() };
        let fit = fit_gd(&data, &cfg, ScaleConstant::NATURAL).unwrap();
        assert_eq!(fit.loss_trace.len(), 7);
        assert!(!fit.converged);
    }

    proptest! {
        #[test]
        fn likelihood_is_permutation_bit_invariant(perm_seed in 0u64..500) {
            let mut records = vec![
                rec("a", "b", Outcome::FirstWins),
                rec("a", "b", Outcome::SecondWins),
                rec("a", "b", Outcome::FirstWins),
                rec("b", "c", Outcome::Tie),
                rec("c", "a", Outcome::FirstWins),
                rec("b", "c", Outcome::SecondWins),
            ];
            crate::numeric::fisher_yates(&mut records, &mut stream_rng(perm_seed, 0));
            let data = Dataset::from_records(records);
            let rv = ratings(&[("a", 0.37), ("b", -1.11), ("c", 0.42)]);
            let scale = ScaleConstant::new(0.9).unwrap();
            let baseline_data = Dataset::from_records(vec![
                rec("a", "b", Outcome::FirstWins),
                rec("a", "b", Outcome::SecondWins),
                rec("a", "b", Outcome::FirstWins),
                rec("b", "c", Outcome::Tie),
                rec("c", "a", Outcome::FirstWins),
                rec("b", "c", Outcome::SecondWins),
            ]);
            let ll = log_likelihood(&rv, &data, scale).unwrap();
            let baseline = log_likelihood(&rv, &baseline_data, scale).unwrap();
            prop_assert_eq!(ll, baseline);
            let g = gradient(&rv, &data, scale).unwrap();
            let gb = gradient(&rv, &baseline_data, scale).unwrap();
            prop_assert_eq!(g, gb);
        }

        #[test]
        fn shift_gauge_on_integer_offsets(offset in -40i32..40) {
            // Integer offsets keep the rating differences bit-identical.
            let data = Dataset::from_records(vec![
                rec("a", "b", Outcome::FirstWins),
                rec("b", "c", Outcome::SecondWins),
                rec("a", "c", Outcome::Tie),
            ]);
            let base = [1.0, -2.0, 3.0];
            let rv0 = ratings(&[("a", base[0]), ("b", base[1]), ("c", base[2])]);
            let t = offset as f64;
            let rv1 = ratings(&[("a", base[0] + t), ("b", base[1] + t), ("c", base[2] + t)]);
            let l0 = log_likelihood(&rv0, &data, ScaleConstant::NATURAL).unwrap();
            let l1 = log_likelihood(&rv1, &data, ScaleConstant::NATURAL).unwrap();
            prop_assert_eq!(l0, l1);
        }
    }
}
