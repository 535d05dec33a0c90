//! Stress-tests leaderboard stability: corrupt a growing share of
//! annotators under each perturbation strategy, then measure how much of
//! the clean ranking survives and how well the corrupted annotators are
//! detected from their fitted abilities.
//!
//! ```sh
//! cargo run --example perturbation_consistency
//! ```

use arena_elo::amelo::fit_joint;
use arena_elo::melo::{fit_gd, OptimConfig};
use arena_elo::metrics::{detection_f1, ranking_consistency, Ranking};
use arena_elo::perturb::{apply, PerturbationPlan, PerturbationStrategy};
use arena_elo::sim::{generate, spaced_ratings, Sampling, SyntheticConfig};
use arena_elo::ScaleConstant;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed = 17;
    let (clean, _) = generate(&SyntheticConfig {
        true_ratings: spaced_ratings(10, 0.4),
        n_annotators: 20,
        sampling: Sampling::PerAnnotator { records: 120 },
        seed,
    })
    .unwrap();
    let optim = OptimConfig::default();

    let melo_clean =
        Ranking::from_ratings(&fit_gd(&clean, &optim, ScaleConstant::NATURAL).unwrap().ratings);
    let amelo_clean = Ranking::from_ratings(&fit_joint(&clean, &optim).unwrap().ratings);

    println!("strategy  ratio  shared-scale  annotator-aware  F1(eps=0)  F1(eps=.005)");
    let strategies = [
        PerturbationStrategy::Random,
        PerturbationStrategy::Equal,
        PerturbationStrategy::Flip,
        PerturbationStrategy::Mixed,
    ];
    for (cell, strategy) in strategies.iter().enumerate() {
        for ratio in [0.2, 0.4] {
            let n_targets = (ratio * clean.n_annotators() as f64).ceil() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ cell as u64);
            let targets = clean
                .annotators()
                .choose_multiple(&mut rng, n_targets)
                .cloned();
            let plan = PerturbationPlan::new(targets, *strategy, seed);
            let (perturbed, truth) = apply(&clean, &plan).unwrap();

            let melo = fit_gd(&perturbed, &optim, ScaleConstant::NATURAL).unwrap();
            let joint = fit_joint(&perturbed, &optim).unwrap();
            let melo_c =
                ranking_consistency(&melo_clean, &Ranking::from_ratings(&melo.ratings)).unwrap();
            let amelo_c =
                ranking_consistency(&amelo_clean, &Ranking::from_ratings(&joint.ratings)).unwrap();
            let f1_strict = detection_f1(&joint.abilities, &truth, 0.0).f1;
            let f1_loose = detection_f1(&joint.abilities, &truth, 0.005).f1;
            let name = strategy.to_string();
            println!(
                "  {name:>6}   {ratio:.1}     {melo_c:.3}          {amelo_c:.3}        {f1_strict:.3}      {f1_loose:.3}"
            );
        }
    }
    println!("\nEqual barely moves either ranking and leaves abilities slightly");
    println!("positive, so it hides from the strict test; a small positive");
    println!("threshold can still catch it. Flip inverts abilities outright.");
}
