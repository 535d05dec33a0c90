//! Sequential Elo updates and seeded shuffle studies.
//!
//! The classic update is order dependent by construction: one pass over
//! the same records in a different order gives different final ratings.
//! [`shuffled_mean`] quantifies that spread so it can be compared against
//! the order-free batch estimators.

use serde::{Deserialize, Serialize};

use crate::core::{CoreError, Dataset, Outcome, RatingVector, ScaleConstant};
use crate::numeric::{fisher_yates, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicConfig {
    /// Step size of one update.
    pub k_factor: f64,
    pub scale: ScaleConstant,
    /// Rating every model starts from.
    pub r_init: f64,
}

impl Default for ClassicConfig {
    /// K = 4, 400-point decade scale, 1000-point start.
    fn default() -> Self {
        ClassicConfig {
            k_factor: 4.0,
            scale: ScaleConstant::classic(),
            r_init: 1000.0,
        }
    }
}

/// One Elo update: each side moves by `K * (score - expected score)`.
/// The pair's rating sum is conserved up to float rounding.
pub fn update_pair(
    r_i: f64,
    r_j: f64,
    outcome: Outcome,
    cfg: &ClassicConfig,
) -> Result<(f64, f64), CoreError> {
    let w = outcome.value();
    let p_i = crate::core::win_prob(r_i, r_j, cfg.scale)?;
    let p_j = crate::core::win_prob(r_j, r_i, cfg.scale)?;
    Ok((
        r_i + cfg.k_factor * (w - p_i),
        r_j + cfg.k_factor * ((1.0 - w) - p_j),
    ))
}

/// One sequential pass over the records in their stored order.
pub fn run_pass(data: &Dataset, cfg: &ClassicConfig) -> RatingVector {
    let mut values = vec![cfg.r_init; data.n_models()];
    for rec in data.records() {
        let (Some(i), Some(j)) = (data.model_index(&rec.first), data.model_index(&rec.second))
        else {
            continue;
        };
        if i == j {
            continue;
        }
        let (ri, rj) = update_pair(values[i], values[j], rec.outcome, cfg)
            .expect("ratings stay finite under bounded updates");
        values[i] = ri;
        values[j] = rj;
    }
    RatingVector::from_sorted(data.models().to_vec(), values)
}

/// Per-model statistics over seeded record-order shuffles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuffleSummary {
    pub mean: RatingVector,
    /// Population standard deviation per model, aligned with `mean`.
    pub std: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub n_shuffles: usize,
    pub seed: u64,
}

/// Runs `n_shuffles` passes, each over an independent Fisher-Yates
/// permutation of the records, and aggregates the final ratings.
///
/// Permutations start from the canonical record order, so two datasets
/// holding the same records in different orders produce identical
/// summaries. Shuffle `s` draws from stream `s` of `seed`.
pub fn shuffled_mean(
    data: &Dataset,
    cfg: &ClassicConfig,
    n_shuffles: usize,
    seed: u64,
) -> Result<ShuffleSummary, CoreError> {
    if n_shuffles == 0 {
        return Err(CoreError::LengthMismatch { expected: 1, got: 0 });
    }
    let indexed = data.indexed();
    let n = data.n_models();
    let mut order: Vec<usize> = (0..indexed.recs.len()).collect();
    let mut mean = vec![0.0f64; n];
    let mut m2 = vec![0.0f64; n];
    let mut min = vec![f64::INFINITY; n];
    let mut max = vec![f64::NEG_INFINITY; n];
    let mut values = vec![0.0f64; n];
    for s in 0..n_shuffles {
        order.sort_unstable();
        fisher_yates(&mut order, &mut stream_rng(seed, s as u64));
        values.iter_mut().for_each(|v| *v = cfg.r_init);
        for &idx in &order {
            let rec = indexed.recs[idx];
            let (i, j) = (rec.i as usize, rec.j as usize);
            let (ri, rj) = update_pair(
                values[i],
                values[j],
                Outcome::from_value(rec.w).expect("stored outcomes are valid"),
                cfg,
            )?;
            values[i] = ri;
            values[j] = rj;
        }
        // Welford, accumulated in shuffle order.
        for i in 0..n {
            let delta = values[i] - mean[i];
            mean[i] += delta / (s + 1) as f64;
            m2[i] += delta * (values[i] - mean[i]);
            min[i] = min[i].min(values[i]);
            max[i] = max[i].max(values[i]);
        }
    }
    let std = m2.iter().map(|v| (v / n_shuffles as f64).sqrt()).collect();
    Ok(ShuffleSummary {
        mean: RatingVector::from_sorted(data.models().to_vec(), mean),
        std,
        min,
        max,
        n_shuffles,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::ComparisonRecord;
    use approx::assert_abs_diff_eq;

    fn rec(first: &str, second: &str, outcome: Outcome) -> ComparisonRecord {
        ComparisonRecord::new(first, second, "k", outcome)
    }

    #[test]
    fn upset_moves_forty_elevenths() {
        // 1400 vs 1000: expected win probability 10/11 for the favorite, so
        // a loss moves each side by 4 * 10/11.
        let cfg = ClassicConfig::default();
        let (ri, rj) = update_pair(1400.0, 1000.0, Outcome::SecondWins, &cfg).unwrap();
        assert_abs_diff_eq!(ri, 1400.0 - 40.0 / 11.0, epsilon = 1e-9);
        assert_abs_diff_eq!(rj, 1000.0 + 40.0 / 11.0, epsilon = 1e-9);
    }

    #[test]
    fn tie_at_equal_ratings_changes_nothing() {
        let cfg = ClassicConfig::default();
        let (ri, rj) = update_pair(1200.0, 1200.0, Outcome::Tie, &cfg).unwrap();
        assert_eq!((ri, rj), (1200.0, 1200.0));
    }

    #[test]
    fn update_conserves_rating_sum() {
        let cfg = ClassicConfig::default();
        for (a, b, o) in [
            (1400.0, 1000.0, Outcome::FirstWins),
            (900.0, 1300.0, Outcome::Tie),
            (1000.0, 1000.0, Outcome::SecondWins),
        ] {
            let (ri, rj) = update_pair(a, b, o, &cfg).unwrap();
            assert_abs_diff_eq!(ri + rj, a + b, epsilon = 1e-9);
        }
    }

    #[test]
    fn update_rejects_non_finite_ratings() {
        let cfg = ClassicConfig::default();
        assert!(update_pair(f64::NAN, 1000.0, Outcome::Tie, &cfg).is_err());
    }

    #[test]
    fn run_pass_depends_on_record_order() {
        let cfg = ClassicConfig::default();
        let forward = Dataset::from_records(vec![
            rec("a", "b", Outcome::FirstWins),
            rec("b", "a", Outcome::FirstWins),
        ]);
        let backward = Dataset::from_records(vec![
            rec("b", "a", Outcome::FirstWins),
            rec("a", "b", Outcome::FirstWins),
        ]);
        let rf = run_pass(&forward, &cfg);
        let rb = run_pass(&backward, &cfg);
        assert_ne!(rf.values(), rb.values());
    }

    #[test]
    fn run_pass_on_empty_dataset_is_empty() {
        let ratings = run_pass(&Dataset::default(), &ClassicConfig::default());
        assert!(ratings.is_empty());
    }

    #[test]
    fn two_record_mean_averages_both_orders() {
        // With two records there are exactly two permutations; the hand
        // computed average of their final ratings brackets the sampled
        // shuffle mean.
        let cfg = ClassicConfig::default();
        let records = vec![rec("a", "b", Outcome::FirstWins), rec("b", "a", Outcome::FirstWins)];
        let orders = [
            Dataset::from_records(records.clone()),
            Dataset::from_records(records.iter().rev().cloned().collect()),
        ];
        let finals: Vec<RatingVector> = orders.iter().map(|d| run_pass(d, &cfg)).collect();
        let exhaustive: Vec<f64> = (0..2)
            .map(|i| (finals[0].values()[i] + finals[1].values()[i]) / 2.0)
            .collect();

        let summary = shuffled_mean(&orders[0], &cfg, 400, 11).unwrap();
        for i in 0..2 {
            assert!(summary.min[i] <= exhaustive[i] && exhaustive[i] <= summary.max[i]);
            // Both permutations occur among 400 draws, so the sampled mean
            // sits strictly between the two order-specific finals.
            assert!(summary.std[i] > 0.0);
            assert_abs_diff_eq!(summary.mean.values()[i], exhaustive[i], epsilon = 0.2);
        }
    }

    #[test]
    fn shuffled_mean_is_input_order_invariant() {
        let cfg = ClassicConfig::default();
        let records = vec![
            rec("a", "b", Outcome::FirstWins),
            rec("b", "c", Outcome::SecondWins),
            rec("a", "c", Outcome::Tie),
            rec("c", "a", Outcome::FirstWins),
        ];
        let forward = Dataset::from_records(records.clone());
        let reversed = Dataset::from_records(records.into_iter().rev().collect());
        let a = shuffled_mean(&forward, &cfg, 50, 3).unwrap();
        let b = shuffled_mean(&reversed, &cfg, 50, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shuffled_mean_rejects_zero_shuffles() {
        assert!(shuffled_mean(&Dataset::default(), &ClassicConfig::default(), 0, 0).is_err());
    }

    #[test]
    fn mean_stays_within_min_max() {
        let cfg = ClassicConfig::default();
        let mut records = Vec::new();
        for s in 0..40 {
            let (a, b) = match s % 3 {
                0 => ("a", "b"),
                1 => ("b", "c"),
                _ => ("c", "a"),
            };
            let outcome = if s % 2 == 0 { Outcome::FirstWins } else { Outcome::SecondWins };
            records.push(rec(a, b, outcome));
        }
        let data = Dataset::from_records(records);
        let summary = shuffled_mean(&data, &cfg, 64, 5).unwrap();
        for i in 0..data.n_models() {
            assert!(summary.std[i] >= 0.0);
            assert!(summary.min[i] <= summary.mean.values()[i]);
            assert!(summary.mean.values()[i] <= summary.max[i]);
        }
    }
}
