mod common;

use mtstab_core::editcore::{
    brute_force_distance, check_deform_sequence, check_sequence, deform_brute_force,
    deform_witness_to_sequence, is_valid_mapping, labeled_isomorphic, mapping_cost, mapping_to_sequence,
};
use mtstab_core::mergetree::{label_for_scheme, LabelSource};
use mtstab_core::{AbstractMergeTree, CostModel, Guards, LabelScheme, LabeledTree, MappingConstraint};
use proptest::prelude::*;

const MAPPED: [MappingConstraint; 3] = [
    MappingConstraint::Tai,
    MappingConstraint::ZhangConstrained,
    MappingConstraint::Selkow,
];

fn labeled(t: &AbstractMergeTree, scheme: LabelScheme) -> LabeledTree {
    label_for_scheme(LabelSource::Tree(t), scheme).unwrap()
}

fn mapped(a: &LabeledTree, b: &LabeledTree, c: MappingConstraint, cost: CostModel) -> f64 {
    brute_force_distance(a, b, c, cost, &Guards::default()).unwrap().0
}

fn deform(a: &AbstractMergeTree, b: &AbstractMergeTree, one_degree: bool) -> f64 {
    deform_brute_force(a, b, one_degree, &Guards::default()).unwrap().cost
}

/// (scheme, cost) pairs the mapping oracle is used with.
fn schemes() -> [(LabelScheme, CostModel); 2] {
    [
        (LabelScheme::NodeDistToParent, CostModel::AbsDiff),
        (LabelScheme::BranchLabelOnNodes, CostModel::Wasserstein),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mapping_distances_are_metrics(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (common::tree(s1, 6), common::tree(s2, 6), common::tree(s3, 6));
        for (scheme, cost) in schemes() {
            let (la, lb, lc) = (labeled(&a, scheme), labeled(&b, scheme), labeled(&c, scheme));
            for k in MAPPED {
                let ab = mapped(&la, &lb, k, cost);
                prop_assert!(mapped(&la, &la, k, cost).abs() < 1e-9);
                prop_assert!((ab - mapped(&lb, &la, k, cost)).abs() < 1e-9, "{:?}", k);
                prop_assert!(mapped(&la, &lc, k, cost) <= ab + mapped(&lb, &lc, k, cost) + 1e-9, "{:?}", k);
            }
        }
    }

    #[test]
    fn deformation_distances_are_metrics(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (common::tree(s1, 7), common::tree(s2, 7), common::tree(s3, 7));
        for od in [false, true] {
            let ab = deform(&a, &b, od);
            prop_assert!(deform(&a, &a, od).abs() < 1e-9);
            prop_assert!((ab - deform(&b, &a, od)).abs() < 1e-9);
            prop_assert!(deform(&a, &c, od) <= ab + deform(&b, &c, od) + 1e-9);
        }
    }

    #[test]
    fn constraints_nest(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (common::tree(s1, 7), common::tree(s2, 7));
        for (scheme, cost) in schemes() {
            let (la, lb) = (labeled(&a, scheme), labeled(&b, scheme));
            let v: Vec<f64> = MAPPED.iter().map(|&k| mapped(&la, &lb, k, cost)).collect();
            prop_assert!(v[0] <= v[1] + 1e-9 && v[1] <= v[2] + 1e-9, "{:?}", v);
        }
        prop_assert!(deform(&a, &b, false) <= deform(&a, &b, true) + 1e-9);
    }

    #[test]
    fn oracle_mappings_are_valid_and_priced(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (common::tree(s1, 6), common::tree(s2, 6));
        for (scheme, cost) in schemes() {
            let (la, lb) = (labeled(&a, scheme), labeled(&b, scheme));
            for k in MAPPED {
                let (d, m) = brute_force_distance(&la, &lb, k, cost, &Guards::default()).unwrap();
                prop_assert!(is_valid_mapping(&la, &lb, &m, k));
                prop_assert!((mapping_cost(&la, &lb, &m, cost) - d).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sequences_replay_mappings(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (common::tree(s1, 6), common::tree(s2, 6));
        for (scheme, cost) in schemes() {
            let (la, lb) = (labeled(&a, scheme), labeled(&b, scheme));
            let (_, m) = brute_force_distance(&la, &lb, MappingConstraint::Tai, cost, &Guards::default()).unwrap();
            let seq = mapping_to_sequence(&la, &lb, &m, cost).unwrap();
            let w = check_sequence(&la, &seq, cost).unwrap();
            prop_assert!(labeled_isomorphic(&w, &lb));
            prop_assert!((seq.cost() - mapping_cost(&la, &lb, &m, cost)).abs() < 1e-9);
        }
    }

    #[test]
    fn deformation_witnesses_replay(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (common::tree(s1, 7), common::tree(s2, 7));
        let target = labeled(&b, LabelScheme::EdgeLength);
        for od in [false, true] {
            let wit = deform_brute_force(&a, &b, od, &Guards::default()).unwrap();
            let seq = deform_witness_to_sequence(&a, &b, &wit).unwrap();
            let w = check_deform_sequence(&a, &seq).unwrap();
            prop_assert!(labeled_isomorphic(&w, &target));
            prop_assert!((seq.cost() - wit.cost).abs() < 1e-9, "{} vs {}", seq.cost(), wit.cost);
        }
    }
}
