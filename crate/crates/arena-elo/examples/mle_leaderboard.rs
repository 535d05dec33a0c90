//! Fits batch maximum-likelihood ratings on a synthetic arena with both
//! solvers and prints a display-scale leaderboard next to the ground
//! truth the data was sampled from.
//!
//! ```sh
//! cargo run --example mle_leaderboard
//! ```

use arena_elo::melo::{fit_gd, fit_newton, OptimConfig};
use arena_elo::sim::{generate, spaced_ratings, Sampling, SyntheticConfig};
use arena_elo::ScaleConstant;

fn main() {
    let (data, truth) = generate(&SyntheticConfig {
        true_ratings: spaced_ratings(8, 0.5),
        n_annotators: 6,
        sampling: Sampling::PerAnnotator { records: 400 },
        seed: 42,
    })
    .unwrap();
    println!(
        "synthetic arena: {} models, {} annotators, {} records\n",
        data.n_models(),
        data.n_annotators(),
        data.n_records()
    );

    // Newton converges in a handful of steps; first-order descent needs
    // a generous epoch budget to match it.
    let optim = OptimConfig { epochs: 40_000, ..OptimConfig::default() };
    let gd = fit_gd(&data, &optim, ScaleConstant::NATURAL).unwrap();
    let newton = fit_newton(&data, &optim, ScaleConstant::NATURAL).unwrap();
    println!(
        "gradient descent: {} epochs recorded, converged = {}",
        gd.loss_trace.len(),
        gd.converged
    );
    println!(
        "newton:           {} steps recorded, converged = {}",
        newton.loss_trace.len(),
        newton.converged
    );
    let solver_gap = gd
        .ratings
        .values()
        .iter()
        .zip(newton.ratings.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("solvers agree to {solver_gap:.2e}\n");

    // Leaderboard in classic display units, best first.
    let mut rows: Vec<_> = newton
        .ratings
        .iter()
        .zip(newton.ratings.to_display())
        .map(|((model, natural), display)| (model.clone(), natural, display))
        .collect();
    rows.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("rank  model  fitted   display   true");
    for (rank, (model, natural, display)) in rows.iter().enumerate() {
        let true_r = truth.get(model).unwrap() - truth.mean();
        println!(
            "  {:>2}  {model:>5}  {natural:+.3}   {display:7.1}  {true_r:+.3}",
            rank + 1
        );
    }

    // The loss trace is monotone for Newton and plot-ready for both.
    let first = newton.loss_trace.first().unwrap();
    let last = newton.loss_trace.last().unwrap();
    println!("\nnewton negative log-likelihood: {first:.2} -> {last:.2}");
}
