//! Joint fit of model ratings and per-annotator abilities. One annotator
//! secretly inverts every vote; their fitted ability comes out negative
//! while honest annotators stay positive.
//!
//! ```sh
//! cargo run --example annotator_abilities
//! ```

use arena_elo::amelo::fit_joint;
use arena_elo::melo::OptimConfig;
use arena_elo::perturb::{apply, PerturbationPlan, PerturbationStrategy};
use arena_elo::sim::{generate, spaced_ratings, Sampling, SyntheticConfig};

fn main() {
    let (clean, _) = generate(&SyntheticConfig {
        true_ratings: spaced_ratings(6, 0.6),
        n_annotators: 8,
        sampling: Sampling::PerAnnotator { records: 150 },
        seed: 5,
    })
    .unwrap();

    // Corrupt one annotator: every decisive vote they cast is flipped.
    let saboteur = clean.annotators()[2].clone();
    let plan = PerturbationPlan::new(
        [saboteur.clone()],
        PerturbationStrategy::Flip,
        99,
    );
    let (data, _) = apply(&clean, &plan).unwrap();

    let (fit, _) = arena_elo::amelo::fit_joint_with(
        &data,
        &OptimConfig::default(),
        &arena_elo::amelo::JointOptions::default(),
    )
    .unwrap();
    println!("converged = {}, abilities sum = {:.6}\n", fit.converged, fit.abilities.sum());

    println!("annotator  ability   verdict");
    for (annotator, theta) in fit.abilities.iter() {
        let verdict = if theta < 0.0 { "anomalous (inverts rankings)" } else { "honest" };
        let marker = if *annotator == saboteur { "  <- flipped in the data" } else { "" };
        println!("  {annotator:>7}  {theta:+.4}   {verdict}{marker}");
    }

    // Ratings stay usable because the saboteur's votes are explained by
    // their negative slope instead of polluting the leaderboard. Scale by
    // the mean ability to compare fits in natural units.
    let baseline = fit_joint(&clean, &OptimConfig::default()).unwrap();
    let scale = |r: &arena_elo::amelo::JointFitResult| {
        r.abilities.sum() / r.abilities.len() as f64
    };
    let (s_fit, s_base) = (scale(&fit), scale(&baseline));
    println!("\nmodel ratings in natural units, corrupted fit vs clean fit:");
    for (model, value) in fit.ratings.iter() {
        println!(
            "  {model}: {:+.3} vs {:+.3}",
            value * s_fit,
            baseline.ratings.get(model).unwrap() * s_base
        );
    }
}
