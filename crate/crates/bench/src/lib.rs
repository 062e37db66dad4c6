//! Seeded inputs shared by the benchmarks.

use crkit::generators::{cycle, random_gnm, random_permutation, random_tree};
use crkit::ColoredGraph;

pub const SEED: u64 = 0x5eed;

/// `G(n, m)` with ten edges per vertex.
pub fn sparse(n: usize) -> ColoredGraph {
    random_gnm(n, 10 * n, SEED).expect("valid density")
}

/// A random tree; trees are amenable, so the recognizer walks every check.
pub fn tree(n: usize) -> ColoredGraph {
    random_tree(n, SEED).expect("n >= 1")
}

/// A cycle and a relabeled copy: one large refinement class, fractionally
/// isomorphic.
pub fn cycle_pair(n: usize) -> (ColoredGraph, ColoredGraph) {
    let g = cycle(n).expect("n >= 3");
    let h = g.permute(&random_permutation(n, SEED));
    (g, h)
}

/// `C_3 + C_k`, which refinement cannot tell from `C_{k+3}`.
pub fn two_cycles(k: usize) -> ColoredGraph {
    let a = cycle(3).expect("valid");
    a.disjoint_union(&cycle(k).expect("k >= 3"))
}
