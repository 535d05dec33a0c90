//! Internal numeric helpers shared by the estimators.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `ln(1e-12)`: floor applied to log-probabilities.
pub(crate) const LOG_PROB_FLOOR: f64 = -27.631021115928547;
/// `ln(1 - 1e-12)`: ceiling applied to log-probabilities.
pub(crate) const LOG_PROB_CEIL: f64 = -9.999778782803785e-13;

/// Numerically stable logistic function.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable `ln(sigmoid(x))`; finite for all finite `x`.
pub(crate) fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// `ln(sigmoid(x))` with the probability clamped to `[1e-12, 1 - 1e-12]`.
///
/// The clamp is applied only inside the logarithm so that saturated
/// comparisons contribute a bounded penalty instead of overwhelming the
/// objective.
pub(crate) fn log_prob_clamped(x: f64) -> f64 {
    log_sigmoid(x).clamp(LOG_PROB_FLOOR, LOG_PROB_CEIL)
}

/// Deterministic RNG for the stream `index` of a master `seed`.
///
/// Every consumer that needs per-item randomness (shuffles, perturbation
/// draws) keys an independent stream off the same seed, so results do not
/// depend on evaluation order.
pub(crate) fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Fisher-Yates shuffle with an explicit, pinned draw sequence.
pub(crate) fn fisher_yates<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// Connected-component labels for an undirected graph on `n` nodes.
///
/// Returns `(label per node, component count)`; labels are contiguous and
/// ordered by first appearance.
pub(crate) fn components(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> (Vec<usize>, usize) {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for (a, b) in edges {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    for node in 0..n {
        let root = find(&mut parent, node);
        if label[root] == usize::MAX {
            label[root] = count;
            count += 1;
        }
        label[node] = label[root];
    }
    (label, count)
}
