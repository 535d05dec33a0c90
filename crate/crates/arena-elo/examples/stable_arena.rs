//! The continual arena loop: votes arrive in rounds, thin annotators are
//! held back until they pass the record gate, each round refits from the
//! previous solution, and an annotator whose fitted ability drops below
//! the threshold is banned and their votes scrubbed.
//!
//! ```sh
//! cargo run --example stable_arena
//! ```

use arena_elo::arena::{ArenaConfig, ArenaState};
use arena_elo::melo::OptimConfig;
use arena_elo::perturb::{apply, PerturbationPlan, PerturbationStrategy};
use arena_elo::sim::{generate, spaced_ratings, Sampling, SyntheticConfig};

fn main() {
    let cfg = ArenaConfig {
        delta: 30,
        epsilon: 0.0,
        optim: OptimConfig::default(),
        warn_only: false,
    };
    let mut state = ArenaState::new();

    for round in 0..3 {
        // Fresh batch of votes; one annotator flips every decisive vote
        // from the second round on.
        let (batch, _) = generate(&SyntheticConfig {
            true_ratings: spaced_ratings(6, 0.6),
            n_annotators: 5,
            sampling: Sampling::PerAnnotator { records: 60 },
            seed: 100 + round,
        })
        .unwrap();
        let batch = if round >= 1 {
            let plan = PerturbationPlan::new(
                [batch.annotators()[0].clone()],
                PerturbationStrategy::Flip,
                round,
            );
            apply(&batch, &plan).unwrap().0
        } else {
            batch
        };

        let report = state.ingest(batch.records());
        println!("{report}");

        match state.evaluate_round(&cfg) {
            Ok(round_report) => {
                println!(
                    "  {} eligible models over {} records",
                    round_report.eligible_models, round_report.eligible_records
                );
                for (annotator, theta) in &round_report.flagged {
                    println!("  banned `{annotator}` with ability {theta:+.4}");
                }
                // Reported ratings are inflated by the ability sum; scale
                // by the mean ability to land back in natural units.
                let fit = &round_report.fit;
                let mean_theta = fit.abilities.sum() / fit.abilities.len() as f64;
                let mut rows: Vec<_> = fit.ratings.iter().collect();
                rows.sort_by(|a, b| b.1.total_cmp(&a.1));
                for (model, value) in rows.iter().take(3) {
                    println!("  {model}: {:+.3}", value * mean_theta);
                }
            }
            Err(err) => println!("  no fit this round: {err}"),
        }
    }

    println!("\nfinal state: round {}, {} banned annotator(s)", state.round(), state.banned().len());
    for (annotator, reason) in state.banned() {
        println!("  `{annotator}`: {reason}");
    }

    // State survives a JSON round trip, so a service can persist it
    // between batches.
    let doc = state.to_json().unwrap();
    let restored = ArenaState::from_json(&doc).unwrap();
    assert_eq!(restored.round(), state.round());
    println!("state serializes to {} bytes of versioned JSON", doc.len());
}
