#![allow(dead_code)]

use mtstab_core::stability::{random_grid_field, random_merge_tree};
use mtstab_core::{AbstractMergeTree, ScalarField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tree(seed: u64, max_nodes: usize) -> AbstractMergeTree {
    random_merge_tree(&mut rng(seed), max_nodes)
}

pub fn grid_field(seed: u64, side: usize, max_edges: usize) -> ScalarField {
    random_grid_field(&mut rng(seed), side, max_edges).unwrap()
}
