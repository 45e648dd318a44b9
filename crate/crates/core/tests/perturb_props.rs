mod common;

use std::collections::BTreeSet;

use mtstab_core::perturb::{
    check_minimal, classify_change, decompose_perturbation, enumerate_minimal_perturbations, Direction,
};
use mtstab_core::{build_augmented, ChangeClass, ScalarField};
use rand::Rng;
use proptest::prelude::*;

/// A random minimal perturbation of a random 3x3 grid field whose result
/// still has a valid merge tree.
fn random_pair(seed: u64) -> (ScalarField, ScalarField) {
    let mut rng = common::rng(seed);
    loop {
        let f = mtstab_core::stability::random_grid_field(&mut rng, 3, 100).unwrap();
        let v = rng.random_range(0..f.len());
        let c = enumerate_minimal_perturbations(&f, v);
        let p = c[rng.random_range(0..c.len())];
        let g = p.apply(&f).unwrap();
        if mtstab_core::AbstractMergeTree::from_field(&g).is_ok() {
            return (f, g);
        }
    }
}

#[test]
fn five_hundred_random_perturbations_classify() {
    let mut seen = BTreeSet::new();
    let mut inconsistent = Vec::new();
    for seed in 0..500 {
        let (f, g) = random_pair(seed);
        let c = classify_change(&f, &g).unwrap();
        seen.insert(c.class);
        if !c.shape.consistent {
            inconsistent.push((seed, c.class, c.shape));
        }
    }
    assert!(inconsistent.is_empty(), "{inconsistent:#?}");
    assert!(seen.contains(&ChangeClass::SimpleChange));
}

#[test]
fn counts_match_class_patterns() {
    for seed in 0..300 {
        let (f, g) = random_pair(seed);
        let c = classify_change(&f, &g).unwrap();
        let (dv, db) = (c.shape.node_delta(), c.shape.bdt_delta());
        match c.class {
            ChangeClass::EdgeSplit => assert_eq!((dv, db), (2, 1), "seed {seed}"),
            ChangeClass::VerticalSwap => {
                assert_eq!((dv, db), (0, 0), "seed {seed}");
                assert_eq!(c.shape.changed_lengths, 1, "seed {seed}");
            }
            ChangeClass::SimpleChange => assert!(dv <= 1 && db <= 1 && dv == db, "seed {seed}"),
            _ => assert!(c.shape.pair_adjacent_saddles, "seed {seed}"),
        }
    }
}

/// Upward moves: a partner that is not adjacent in the augmented tree leaves
/// the edges alone; a partner that is a child of the moved vertex becomes its
/// parent and takes over the old parent.
#[test]
fn augmented_tree_edge_rules() {
    let mut checked = [0usize; 2];
    for seed in 0..400 {
        let (f, g) = random_pair(seed);
        let p = check_minimal(&f, &g).unwrap().unwrap();
        let (lo, hi, p) = match p.direction() {
            Direction::Up => (&f, &g, p),
            Direction::Down => (&g, &f, check_minimal(&g, &f).unwrap().unwrap()),
        };
        let Some(y) = p.swap_partner else { continue };
        let x = p.vertex;
        let (a, b) = (build_augmented(lo), build_augmented(hi));
        if a.parent[y] == Some(x) {
            assert_eq!(b.parent[x], Some(y), "seed {seed}");
            assert_eq!(b.parent[y], a.parent[x], "seed {seed}");
            checked[1] += 1;
        } else if a.parent[x] != Some(y) {
            assert_eq!(a.edges(), b.edges(), "seed {seed}");
            checked[0] += 1;
        }
    }
    assert!(checked.iter().all(|&c| c > 0), "{checked:?}");
}

fn inversions(a: &[f64], b: &[f64]) -> BTreeSet<(usize, usize)> {
    let n = a.len();
    let mut s = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if (a[i] < a[j]) != (b[i] < b[j]) {
                s.insert((i, j));
            }
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn decomposition_is_exact_and_economical(seed in any::<u64>(), eps in 0.01f64..0.3) {
        let mut rng = common::rng(seed);
        let f = mtstab_core::stability::random_grid_field(&mut rng, 3, 100).unwrap();
        let g = f.with_values(f.values().iter().map(|v| v + rng.random_range(-eps..eps)).collect());
        let Ok(g) = g else { return Ok(()) };
        let Ok(seq) = decompose_perturbation(&f, &g) else { return Ok(()) };
        prop_assert_eq!(seq.last().values(), g.values());
        prop_assert_eq!(seq.fields.len(), seq.steps.len() + 1);
        let want = inversions(f.values(), g.values());
        let mut swapped = BTreeSet::new();
        for (w, step) in seq.fields.windows(2).zip(&seq.steps) {
            prop_assert_eq!(check_minimal(&w[0], &w[1]).unwrap(), Some(*step));
            if let Some(y) = step.swap_partner {
                let pair = (step.vertex.min(y), step.vertex.max(y));
                prop_assert!(want.contains(&pair), "agreeing pair {:?} swapped", pair);
                prop_assert!(swapped.insert(pair), "pair {:?} swapped twice", pair);
            }
        }
        prop_assert_eq!(swapped, want.clone());
        prop_assert!(seq.len() <= f.len() + want.len());
    }
}
