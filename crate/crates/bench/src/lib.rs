//! Fixtures shared by the distance benchmarks.

use mtstab_core::stability::{random_grid_field, random_merge_tree};
use mtstab_core::{AbstractMergeTree, ScalarField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two random trees with exactly `nodes` nodes each.
pub fn tree_pair(seed: u64, nodes: usize) -> (AbstractMergeTree, AbstractMergeTree) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = || loop {
        let t = random_merge_tree(&mut rng, nodes);
        if t.len() == nodes {
            return t;
        }
    };
    (next(), next())
}

/// A random field on a `side x side` grid, any tree size.
pub fn grid_field(seed: u64, side: usize) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_grid_field(&mut rng, side, usize::MAX).expect("grid side >= 2")
}
