//! Tour of the core comparison model: outcomes, win probabilities on the
//! two supported scales, and the display mapping between them.
//!
//! ```sh
//! cargo run --example win_probabilities
//! ```

use arena_elo::{win_prob, Outcome, RatingVector, ScaleConstant};

fn main() {
    // Natural units: win probability is sigmoid(r_i - r_j).
    println!("natural scale (P = sigmoid of the rating gap):");
    for gap in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let p = win_prob(gap, 0.0, ScaleConstant::NATURAL).unwrap();
        println!("  gap {gap:4.1} -> P(first wins) = {p:.4}");
    }

    // Classic chess-style units: the same curve, stretched so that a
    // 400-point gap means 10:1 odds.
    println!("\nclassic scale (400 points = 10:1 odds):");
    for gap in [0.0, 100.0, 200.0, 400.0, 800.0] {
        let p = win_prob(1000.0 + gap, 1000.0, ScaleConstant::classic()).unwrap();
        println!("  gap {gap:5.0} -> P(first wins) = {p:.4}");
    }

    // The two scales are the same model under a linear change of units.
    let natural = RatingVector::new(
        vec!["alpha".into(), "beta".into(), "gamma".into()],
        vec![0.8, 0.0, -0.8],
    )
    .unwrap();
    println!("\nnatural ratings and their classic display values:");
    for ((model, value), display) in natural.iter().zip(natural.to_display()) {
        println!("  {model}: {value:+.2} natural = {display:.1} display");
    }
    let p_nat = win_prob(0.8, -0.8, ScaleConstant::NATURAL).unwrap();
    let display = natural.to_display();
    let p_cls = win_prob(display[0], display[2], ScaleConstant::classic()).unwrap();
    println!("  alpha over gamma: natural {p_nat:.6}, classic {p_cls:.6}");

    // Outcomes carry the first-listed model's score; flipping the pair
    // flips the outcome, ties are symmetric.
    println!("\noutcome scores from the first model's perspective:");
    for outcome in [Outcome::FirstWins, Outcome::Tie, Outcome::SecondWins] {
        println!(
            "  {outcome:?}: score {} (flipped: {:?})",
            outcome.value(),
            outcome.flipped()
        );
    }
}
