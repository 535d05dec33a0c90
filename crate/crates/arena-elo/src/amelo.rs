//! Annotator-aware ratings.
//!
//! Each annotator `k` gets an ability `theta_k` that replaces the shared
//! scale constant in the win probability:
//!
//! ```text
//! P(i beats j | k) = sigmoid(theta_k * (R_i - R_j))
//! ```
//!
//! A reliable annotator has `theta_k` near the crowd consensus; an
//! adversarial one earns `theta_k < 0` because flipping the sign of its
//! ability explains its inverted labels. The likelihood is invariant
//! under `(R, theta) -> (alpha R, theta / alpha)`, so the fit constrains
//! the abilities to sum to one and mean-centers the ratings.
//!
//! Internally the optimizer works in a rescaled gauge where abilities sum
//! to the number of annotators (each near 1). In the reported gauge the
//! sum-to-one constraint squeezes every ability to O(1/M), ratings blow up
//! by the inverse factor, and gradient steps that suit one block stall the
//! other; the rescaled gauge keeps both blocks near unit scale. The final
//! iterate is converted back exactly, which is a bijection, so the
//! constrained optimum is unchanged.

use serde::{Deserialize, Serialize};

use crate::core::{AbilityVector, AnnotatorId, Dataset, ModelId, RatingVector};
use crate::melo::{centered, separability_warnings, FitError, OptimConfig, DIVERGENCE_BOUND};
use crate::numeric::{log_prob_clamped, sigmoid, stream_rng};
use rand::Rng;

/// Win probability under annotator ability `theta`.
///
/// `theta = 0` returns 0.5 regardless of the ratings; `theta < 0` inverts
/// the preference implied by the rating gap.
pub fn win_prob_annotator(r_i: f64, r_j: f64, theta: f64) -> f64 {
    sigmoid(theta * (r_i - r_j))
}

/// Output of a joint ratings-and-abilities fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointFitResult {
    /// Mean-zero per comparison-graph component.
    pub ratings: RatingVector,
    /// Summing to one when `normalized` is set, raw otherwise.
    pub abilities: AbilityVector,
    /// Negative log-likelihood after each completed epoch, evaluated in
    /// the reported gauge.
    pub loss_trace: Vec<f64>,
    pub converged: bool,
    /// Final mean-gradient max-norm across both blocks.
    pub grad_norm: f64,
    /// Whether the sum-to-one constraint was applied.
    pub normalized: bool,
    pub warnings: Vec<String>,
}

/// Ratings and abilities captured during a fit, in the reported gauge,
/// aligned with the dataset's registries.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSnapshot {
    pub epoch: usize,
    pub ratings: Vec<f64>,
    pub abilities: Vec<f64>,
}

/// Initial point of a joint fit.
#[derive(Debug, Clone, PartialEq)]
pub enum JointInit {
    /// Zero ratings, uniform abilities.
    Default,
    /// Randomized start: abilities drawn near the consensus orientation,
    /// ratings perturbed around zero.
    Seeded(u64),
    /// Resume from earlier estimates; models or annotators they do not
    /// cover start at the default.
    Warm { ratings: RatingVector, abilities: AbilityVector },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointOptions {
    pub init: JointInit,
    /// Apply the sum-to-one constraint during and after the fit. Turning
    /// this off exposes the unconstrained dynamics, where per-annotator
    /// ability signs are free to disagree across restarts.
    pub normalize: bool,
    /// Record a snapshot every this many epochs; 0 disables snapshots.
    pub snapshot_every: usize,
}

impl Default for JointOptions {
    fn default() -> Self {
        JointOptions { init: JointInit::Default, normalize: true, snapshot_every: 0 }
    }
}

/// Log-likelihood of `(ratings, abilities)` on `data` (sum over records).
pub fn log_likelihood_joint(
    ratings: &RatingVector,
    abilities: &AbilityVector,
    data: &Dataset,
) -> Result<f64, FitError> {
    let (r, theta) = pull_params(ratings, abilities, data)?;
    let indexed = data.indexed();
    Ok(-joint_neg_log_likelihood(&indexed.recs, &r, &theta))
}

/// Gradients of the log-likelihood, aligned with `data.models()` and
/// `data.annotators()`: the rating block accumulates `theta_k (W - P)`,
/// the ability block `(R_i - R_j)(W - P)`.
pub fn gradients_joint(
    ratings: &RatingVector,
    abilities: &AbilityVector,
    data: &Dataset,
) -> Result<(Vec<f64>, Vec<f64>), FitError> {
    let (r, theta) = pull_params(ratings, abilities, data)?;
    let indexed = data.indexed();
    let mut grad_r = vec![0.0; r.len()];
    let mut grad_t = vec![0.0; theta.len()];
    accumulate_joint(&indexed.recs, &r, &theta, &mut grad_r, &mut grad_t);
    Ok((grad_r, grad_t))
}

/// Rescales abilities to sum to one. Fails when the sum is too close to
/// zero for the division to mean anything.
pub fn normalize(abilities: &AbilityVector) -> Result<AbilityVector, FitError> {
    let sum = abilities.sum();
    if sum.abs() < 1e-12 {
        return Err(FitError::DegenerateAbilities { sum });
    }
    Ok(AbilityVector::from_sorted(
        abilities.annotators().to_vec(),
        abilities.values().iter().map(|v| v / sum).collect(),
    ))
}

/// Joint fit with default options (zero init, normalization on).
pub fn fit_joint(data: &Dataset, cfg: &OptimConfig) -> Result<JointFitResult, FitError> {
    fit_joint_with(data, cfg, &JointOptions::default()).map(|(result, _)| result)
}

/// Joint full-batch gradient ascent over ratings and abilities.
pub fn fit_joint_with(
    data: &Dataset,
    cfg: &OptimConfig,
    opts: &JointOptions,
) -> Result<(JointFitResult, Vec<JointSnapshot>), FitError> {
    let indexed = data.indexed();
    let n = indexed.n_models;
    let m = indexed.n_annotators;
    if n < 2 {
        return Err(FitError::TooFewModels(n));
    }
    let s = indexed.recs.len() as f64;
    let mf = m as f64;
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

    // Internal gauge: abilities sum to m (each near 1). External
    // estimates (r_ext, t_ext) with sum(t_ext) = s_ext map in via
    // t = t_ext * m / s_ext, r = r_ext * s_ext / m.
    let (mut r, mut theta) = match &opts.init {
        JointInit::Default => (vec![0.0; n], vec![1.0; m]),
        JointInit::Seeded(seed) => {
            let mut rng = stream_rng(*seed, 0);
            // One global orientation sign per restart: the likelihood is
            // even under (R, theta) -> (-R, -theta), and mixed per-annotator
            // signs would put the first renormalization near a zero sum.
            let sign = if rng.gen_range(0..2) == 0 { 1.0 } else { -1.0 };
            let theta = (0..m).map(|_| sign * rng.gen_range(0.5..1.5)).collect();
            let r = (0..n).map(|_| rng.gen_range(-0.25..0.25)).collect();
            (r, theta)
        }
        JointInit::Warm { ratings, abilities } => {
            let mut r_ext = vec![0.0; n];
            for (idx, model) in data.models().iter().enumerate() {
                if let Some(v) = ratings.get(model) {
                    r_ext[idx] = v;
                }
            }
            let known: Vec<f64> = data
                .annotators()
                .iter()
                .filter_map(|a| abilities.get(a))
                .collect();
            let fallback = if known.is_empty() {
                1.0 / mf
            } else {
                known.iter().sum::<f64>() / known.len() as f64
            };
            let t_ext: Vec<f64> = data
                .annotators()
                .iter()
                .map(|a| abilities.get(a).unwrap_or(fallback))
                .collect();
            let s_ext = t_ext.iter().sum::<f64>();
            if s_ext.abs() < 1e-12 {
                return Err(FitError::DegenerateAbilities { sum: s_ext });
            }
            (
                r_ext.iter().map(|v| v * s_ext / mf).collect(),
                t_ext.iter().map(|v| v * mf / s_ext).collect(),
            )
        }
    };

    let mut grad_r = vec![0.0; n];
    let mut grad_t = vec![0.0; m];
    let mut trace = Vec::new();
    let mut snapshots = Vec::new();
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;

    for epoch in 0..=cfg.epochs {
        grad_r.iter_mut().for_each(|g| *g = 0.0);
        grad_t.iter_mut().for_each(|g| *g = 0.0);
        let loss = accumulate_joint(&indexed.recs, &r, &theta, &mut grad_r, &mut grad_t);
        if !loss.is_finite() {
            return Err(FitError::Diverged { epoch });
        }
        if cfg.ridge > 0.0 {
            for i in 0..n {
                grad_r[i] -= 2.0 * cfg.ridge * r[i];
            }
        }
        if epoch > 0 {
            trace.push(loss);
        }
        grad_norm = (max_abs(&grad_r).max(max_abs(&grad_t))) / s;
        if grad_norm <= cfg.grad_tol {
            converged = true;
            break;
        }
        if epoch == cfg.epochs {
            break;
        }
        let step = cfg.learning_rate / s;
        for i in 0..n {
            r[i] += step * grad_r[i];
        }
        for k in 0..m {
            theta[k] += step * grad_t[k];
        }
        if opts.normalize {
            // Signed rescale back onto sum(theta) = m; the compensating
            // rating rescale keeps the likelihood exactly invariant.
            let sum = theta.iter().sum::<f64>();
            if sum.abs() < 1e-12 * mf {
                return Err(FitError::DegenerateAbilities { sum: sum / mf });
            }
            let factor = mf / sum;
            theta.iter_mut().for_each(|t| *t *= factor);
            r.iter_mut().for_each(|v| *v /= factor);
        }
        for (idx, &value) in r.iter().enumerate() {
            if !value.is_finite() || value.abs() * scale_of(&theta) > DIVERGENCE_BOUND {
                return Err(FitError::Separable {
                    epoch,
                    model: data.models()[idx].clone(),
                    bound: DIVERGENCE_BOUND,
                });
            }
        }
        if opts.snapshot_every > 0 && (epoch + 1) % opts.snapshot_every == 0 {
            let (r_out, t_out) = report_gauge(&r, &theta, &labels, n_components, opts.normalize, mf)?;
            snapshots.push(JointSnapshot { epoch: epoch + 1, ratings: r_out, abilities: t_out });
        }
    }

    let (r_out, t_out) = report_gauge(&r, &theta, &labels, n_components, opts.normalize, mf)?;
    Ok((
        JointFitResult {
            ratings: RatingVector::from_sorted(data.models().to_vec(), r_out),
            abilities: AbilityVector::from_sorted(data.annotators().to_vec(), t_out),
            loss_trace: trace,
            converged,
            grad_norm,
            normalized: opts.normalize,
            warnings,
        },
        snapshots,
    ))
}

/// Converts an internal iterate to the reported gauge: exact rescale onto
/// `sum(theta) = 1` plus per-component mean-centering when normalizing,
/// the raw iterate otherwise.
fn report_gauge(
    r: &[f64],
    theta: &[f64],
    labels: &[usize],
    n_components: usize,
    normalize: bool,
    mf: f64,
) -> Result<(Vec<f64>, Vec<f64>), FitError> {
    if !normalize {
        return Ok((r.to_vec(), theta.to_vec()));
    }
    let sum = theta.iter().sum::<f64>();
    if sum.abs() < 1e-12 * mf {
        return Err(FitError::DegenerateAbilities { sum: sum / mf });
    }
    let t_out = theta.iter().map(|t| t / sum).collect();
    let r_scaled: Vec<f64> = r.iter().map(|v| v * sum).collect();
    Ok((centered(&r_scaled, labels, n_components), t_out))
}

/// Estimated ability magnitude used to express the divergence bound in
/// probability-relevant units (`theta * r` is what enters the logistic).
fn scale_of(theta: &[f64]) -> f64 {
    let mean = theta.iter().map(|t| t.abs()).sum::<f64>() / theta.len().max(1) as f64;
    mean.max(1e-3)
}

pub(crate) fn joint_neg_log_likelihood(
    recs: &[crate::core::IndexedRecord],
    r: &[f64],
    theta: &[f64],
) -> f64 {
    let mut loss = 0.0;
    for rec in recs {
        let x = theta[rec.k as usize] * (r[rec.i as usize] - r[rec.j as usize]);
        loss -= rec.w * log_prob_clamped(x) + (1.0 - rec.w) * log_prob_clamped(-x);
    }
    loss
}

/// Adds both gradient blocks and returns the negative log-likelihood from
/// the same pass.
fn accumulate_joint(
    recs: &[crate::core::IndexedRecord],
    r: &[f64],
    theta: &[f64],
    grad_r: &mut [f64],
    grad_t: &mut [f64],
) -> f64 {
    let mut loss = 0.0;
    for rec in recs {
        let (i, j, k) = (rec.i as usize, rec.j as usize, rec.k as usize);
        let d = r[i] - r[j];
        let x = theta[k] * d;
        let p = sigmoid(x);
        let e = rec.w - p;
        grad_r[i] += theta[k] * e;
        grad_r[j] -= theta[k] * e;
        grad_t[k] += d * e;
        loss -= rec.w * log_prob_clamped(x) + (1.0 - rec.w) * log_prob_clamped(-x);
    }
    loss
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

fn pull_params(
    ratings: &RatingVector,
    abilities: &AbilityVector,
    data: &Dataset,
) -> Result<(Vec<f64>, Vec<f64>), FitError> {
    let r = data
        .models()
        .iter()
        .map(|m: &ModelId| ratings.get(m).ok_or_else(|| FitError::MissingModel(m.clone())))
        .collect::<Result<Vec<f64>, _>>()?;
    let theta = data
        .annotators()
        .iter()
        .map(|a: &AnnotatorId| abilities.get(a).ok_or_else(|| FitError::MissingAnnotator(a.clone())))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok((r, theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{ComparisonRecord, Outcome, ScaleConstant};
    use crate::melo;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rec(first: &str, second: &str, annotator: &str, outcome: Outcome) -> ComparisonRecord {
        ComparisonRecord::new(first, second, annotator, outcome)
    }

    fn small_data() -> Dataset {
        Dataset::from_records(vec![
            rec("a", "b", "k1", Outcome::FirstWins),
            rec("a", "b", "k1", Outcome::SecondWins),
            rec("a", "b", "k2", Outcome::FirstWins),
            rec("b", "c", "k2", Outcome::Tie),
            rec("c", "a", "k1", Outcome::FirstWins),
            rec("b", "c", "k2", Outcome::SecondWins),
        ])
    }

    fn params(data: &Dataset, r: &[f64], t: &[f64]) -> (RatingVector, AbilityVector) {
        (
            RatingVector::new(data.models().to_vec(), r.to_vec()).unwrap(),
            AbilityVector::new(data.annotators().to_vec(), t.to_vec()).unwrap(),
        )
    }

    #[test]
    fn zero_ability_is_a_coin_flip() {
        assert_eq!(win_prob_annotator(5.0, -3.0, 0.0), 0.5);
    }

    #[test]
    fn negative_ability_inverts_the_favorite() {
        let p = win_prob_annotator(2.0, 0.0, -1.0);
        assert_abs_diff_eq!(p, sigmoid(-2.0), epsilon = 1e-15);
        assert!(p < 0.5);
    }

    #[test]
    fn ability_derivative_scales_rating_gradient() {
        // d/dr_i of P = theta P (1 - P): at r_i = r_j this is theta / 4.
        let theta = 0.73;
        let h = 1e-6;
        let fd = (win_prob_annotator(h, 0.0, theta) - win_prob_annotator(-h, 0.0, theta)) / (2.0 * h);
        assert_abs_diff_eq!(4.0 * fd, theta, epsilon = 1e-8);
    }

    #[test]
    fn joint_gradients_match_finite_differences() {
        let data = small_data();
        let r0 = [0.3, -0.2, 0.5];
        let t0 = [0.8, 1.3];
        let (rv, av) = params(&data, &r0, &t0);
        let (grad_r, grad_t) = gradients_joint(&rv, &av, &data).unwrap();
        let h = 1e-5;
        let ll = |r: &[f64], t: &[f64]| {
            let (rv, av) = params(&data, r, t);
            log_likelihood_joint(&rv, &av, &data).unwrap()
        };
        for idx in 0..3 {
            let mut lo = r0;
            let mut hi = r0;
            lo[idx] -= h;
            hi[idx] += h;
            let fd = (ll(&hi, &t0) - ll(&lo, &t0)) / (2.0 * h);
            assert_abs_diff_eq!(grad_r[idx], fd, epsilon = 1e-8);
        }
        for idx in 0..2 {
            let mut lo = t0;
            let mut hi = t0;
            lo[idx] -= h;
            hi[idx] += h;
            let fd = (ll(&r0, &hi) - ll(&r0, &lo)) / (2.0 * h);
            assert_abs_diff_eq!(grad_t[idx], fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn uniform_abilities_reduce_rating_gradient_to_shared_scale() {
        // With every theta = 1/M the rating block equals the shared-scale
        // gradient at c = 1/M, term for term.
        let data = small_data();
        let r0 = [0.4, -0.1, 0.6];
        let m = data.n_annotators() as f64;
        let (rv, av) = params(&data, &r0, &vec![1.0 / m; data.n_annotators()]);
        let (grad_r, _) = gradients_joint(&rv, &av, &data).unwrap();
        let shared = melo::gradient(&rv, &data, ScaleConstant::new(1.0 / m).unwrap()).unwrap();
        for idx in 0..3 {
            assert_eq!(grad_r[idx], shared[idx]);
        }
    }

    #[test]
    fn single_annotator_matches_shared_scale_fit() {
        let data = Dataset::from_records(vec![
            rec("a", "b", "only", Outcome::FirstWins),
            rec("a", "b", "only", Outcome::FirstWins),
            rec("a", "b", "only", Outcome::SecondWins),
            rec("b", "c", "only", Outcome::FirstWins),
            rec("a", "c", "only", Outcome::FirstWins),
            rec("b", "c", "only", Outcome::SecondWins),
            rec("c", "a", "only", Outcome::SecondWins),
            rec("b", "c", "only", Outcome::FirstWins),
        ]);
        let cfg = OptimConfig { epochs: 20_000, ..OptimConfig::default() };
        let joint = fit_joint(&data, &cfg).unwrap();
        // M = 1 pins theta at exactly 1 on every epoch, reducing the model
        // to the shared scale c = 1.
        assert_eq!(joint.abilities.values(), &[1.0]);
        let shared = melo::fit_gd(&data, &cfg, ScaleConstant::NATURAL).unwrap();
        for model in data.models() {
            assert_abs_diff_eq!(
                joint.ratings.get(model).unwrap(),
                shared.ratings.get(model).unwrap(),
                epsilon = 1e-6
            );
        }
    }

    #[test]
    fn reported_abilities_sum_to_one() {
        let data = small_data();
        let joint = fit_joint(&data, &OptimConfig::default()).unwrap();
        assert_abs_diff_eq!(joint.abilities.sum(), 1.0, epsilon = 1e-12);
        assert!(joint.normalized);
        assert_abs_diff_eq!(joint.ratings.mean(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn no_norm_returns_raw_iterate() {
        let data = small_data();
        let opts = JointOptions { normalize: false, ..JointOptions::default() };
        let (joint, _) = fit_joint_with(&data, &OptimConfig::default(), &opts).unwrap();
        assert!(!joint.normalized);
        // Raw abilities stay near the unit init, nowhere near summing to 1.
        assert!(joint.abilities.sum() > 1.2);
    }

    #[test]
    fn warm_start_resumes_and_accepts_strangers() {
        let data = small_data();
        let first = fit_joint(&data, &OptimConfig::default()).unwrap();
        let opts = JointOptions {
            init: JointInit::Warm { ratings: first.ratings.clone(), abilities: first.abilities.clone() },
            ..JointOptions::default()
        };
        let mut records = data.records().to_vec();
        records.push(rec("d", "a", "k3", Outcome::SecondWins));
        records.push(rec("d", "b", "k3", Outcome::FirstWins));
        let grown = Dataset::from_records(records);
        let (resumed, _) = fit_joint_with(&grown, &OptimConfig::default(), &opts).unwrap();
        assert_abs_diff_eq!(resumed.abilities.sum(), 1.0, epsilon = 1e-12);
        assert!(resumed.ratings.get(&"d".into()).is_some());
    }

    #[test]
    fn normalization_helper_rejects_zero_sum() {
        let av = AbilityVector::new(
            vec!["x".into(), "y".into()],
            vec![0.5, -0.5],
        )
        .unwrap();
        assert!(matches!(normalize(&av), Err(FitError::DegenerateAbilities { .. })));
        let av = AbilityVector::new(vec!["x".into(), "y".into()], vec![3.0, 1.0]).unwrap();
        assert_eq!(normalize(&av).unwrap().values(), &[0.75, 0.25]);
    }

    #[test]
    fn snapshots_keep_the_constraint_every_epoch() {
        let data = small_data();
        let cfg = OptimConfig { epochs: 25, grad_tol: 0.0, ..OptimConfig::default() };
        let opts = JointOptions { snapshot_every: 1, ..JointOptions::default() };
        let (_, snaps) = fit_joint_with(&data, &cfg, &opts).unwrap();
        assert_eq!(snaps.len(), 25);
        for snap in &snaps {
            assert_abs_diff_eq!(snap.abilities.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn likelihood_invariant_under_reciprocal_gauge(alpha in prop::sample::select(vec![-2.0f64, -1.0, 0.5, 3.0])) {
            let data = small_data();
            let r0 = [0.7, -0.3, 0.1];
            let t0 = [0.9, 1.4];
            let (rv, av) = params(&data, &r0, &t0);
            let scaled_r: Vec<f64> = r0.iter().map(|v| v * alpha).collect();
            let scaled_t: Vec<f64> = t0.iter().map(|v| v / alpha).collect();
            let (rv2, av2) = params(&data, &scaled_r, &scaled_t);
            let l0 = log_likelihood_joint(&rv, &av, &data).unwrap();
            let l1 = log_likelihood_joint(&rv2, &av2, &data).unwrap();
            prop_assert!((l0 - l1).abs() <= 1e-10);
        }

        #[test]
        fn joint_fit_is_order_invariant(perm_seed in 0u64..200) {
            let base = small_data();
            let mut records = base.records().to_vec();
            crate::numeric::fisher_yates(&mut records, &mut stream_rng(perm_seed, 7));
            let shuffled = Dataset::from_records(records);
            let cfg = OptimConfig { epochs: 60, ..OptimConfig::default() };
            let a = fit_joint(&base, &cfg).unwrap();
            let b = fit_joint(&shuffled, &cfg).unwrap();
            prop_assert_eq!(a.ratings.values(), b.ratings.values());
            prop_assert_eq!(a.abilities.values(), b.abilities.values());
        }
    }
}
