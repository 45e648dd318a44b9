//! The eight merge tree distances.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::editcore::{
    brute_force_distance, deform_brute_force, guard, selkow_dp, selkow_dp_ordered, CostModel, Guards,
    MappingConstraint,
};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::mergetree::{
    all_branch_decompositions, build_bdt, build_obdt, label_for_scheme, AbstractMergeTree, Bdt,
    LabelScheme, LabelSource, LabeledTree, OrderedBdt,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricId {
    /// Wasserstein distance on unordered BDTs.
    W,
    /// Ordered BDT distance.
    X,
    /// Constrained distance with branch labels on merge tree nodes.
    S,
    /// Classic one-degree distance.
    L,
    /// Classic general distance.
    G,
    /// Path mapping distance.
    P,
    /// Deformation-based distance.
    E,
    /// Branch mapping distance.
    B,
}

impl MetricId {
    pub const ALL: [MetricId; 8] = [
        MetricId::W,
        MetricId::X,
        MetricId::S,
        MetricId::L,
        MetricId::G,
        MetricId::P,
        MetricId::E,
        MetricId::B,
    ];

    pub fn letter(&self) -> char {
        match self {
            MetricId::W => 'w',
            MetricId::X => 'x',
            MetricId::S => 's',
            MetricId::L => 'l',
            MetricId::G => 'g',
            MetricId::P => 'p',
            MetricId::E => 'e',
            MetricId::B => 'b',
        }
    }

    /// Whether the value is computed by a polynomial algorithm.
    pub fn is_polynomial(&self) -> bool {
        matches!(self, MetricId::W | MetricId::X | MetricId::L)
    }

    /// Parses a comma separated list such as `e,p,l,w`.
    pub fn parse_list(s: &str) -> Result<Vec<MetricId>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricId::ALL
            .into_iter()
            .find(|m| s.eq_ignore_ascii_case(&m.letter().to_string()))
            .ok_or_else(|| Error::Parameter(format!("unknown metric '{s}', expected one of w|x|s|l|g|p|e|b")))
    }
}

fn labeled(t: &AbstractMergeTree, scheme: LabelScheme) -> LabeledTree {
    label_for_scheme(LabelSource::Tree(t), scheme).expect("merge trees support this scheme")
}

pub fn bdt_labeled(b: &Bdt) -> LabeledTree {
    label_for_scheme(LabelSource::Bdt(b), LabelScheme::BdtBirthDeath).expect("bdt scheme")
}

pub fn obdt_labeled(o: &OrderedBdt) -> LabeledTree {
    label_for_scheme(LabelSource::Obdt(o), LabelScheme::OrderedBdtBirthDeath).expect("obdt scheme")
}

/// Labelled trees and cost model a mapping based metric works on.
pub fn metric_inputs(
    metric: MetricId,
    t1: &AbstractMergeTree,
    t2: &AbstractMergeTree,
) -> Option<(LabeledTree, LabeledTree, MappingConstraint, CostModel)> {
    let (l1, l2, c, cost) = match metric {
        MetricId::W => (
            bdt_labeled(&build_bdt(t1)),
            bdt_labeled(&build_bdt(t2)),
            MappingConstraint::Selkow,
            CostModel::Wasserstein,
        ),
        MetricId::X => (
            obdt_labeled(&build_obdt(t1)),
            obdt_labeled(&build_obdt(t2)),
            MappingConstraint::Selkow,
            CostModel::Wasserstein,
        ),
        MetricId::L | MetricId::G => (
            labeled(t1, LabelScheme::NodeDistToParent),
            labeled(t2, LabelScheme::NodeDistToParent),
            if metric == MetricId::L {
                MappingConstraint::Selkow
            } else {
                MappingConstraint::Tai
            },
            CostModel::AbsDiff,
        ),
        MetricId::S => (
            labeled(t1, LabelScheme::BranchLabelOnNodes),
            labeled(t2, LabelScheme::BranchLabelOnNodes),
            MappingConstraint::ZhangConstrained,
            CostModel::Wasserstein,
        ),
        MetricId::E | MetricId::P | MetricId::B => return None,
    };
    Some((l1, l2, c, cost))
}

pub fn delta_w(t1: &AbstractMergeTree, t2: &AbstractMergeTree) -> f64 {
    let (l1, l2, _, cost) = metric_inputs(MetricId::W, t1, t2).unwrap();
    selkow_dp(&l1, &l2, cost).0
}

pub fn delta_x(t1: &AbstractMergeTree, t2: &AbstractMergeTree) -> f64 {
    let (l1, l2, _, cost) = metric_inputs(MetricId::X, t1, t2).unwrap();
    selkow_dp_ordered(&l1, &l2, cost).0
}

pub fn delta_l(t1: &AbstractMergeTree, t2: &AbstractMergeTree) -> f64 {
    let (l1, l2, _, cost) = metric_inputs(MetricId::L, t1, t2).unwrap();
    selkow_dp(&l1, &l2, cost).0
}

pub fn delta_g(t1: &AbstractMergeTree, t2: &AbstractMergeTree, guards: &Guards) -> Result<f64> {
    let (l1, l2, c, cost) = metric_inputs(MetricId::G, t1, t2).unwrap();
    Ok(brute_force_distance(&l1, &l2, c, cost, guards)?.0)
}

pub fn delta_s(t1: &AbstractMergeTree, t2: &AbstractMergeTree, guards: &Guards) -> Result<f64> {
    let (l1, l2, c, cost) = metric_inputs(MetricId::S, t1, t2).unwrap();
    Ok(brute_force_distance(&l1, &l2, c, cost, guards)?.0)
}

pub fn delta_e(t1: &AbstractMergeTree, t2: &AbstractMergeTree, guards: &Guards) -> Result<f64> {
    Ok(deform_brute_force(t1, t2, false, guards)?.cost)
}

pub fn delta_p(t1: &AbstractMergeTree, t2: &AbstractMergeTree, guards: &Guards) -> Result<f64> {
    Ok(deform_brute_force(t1, t2, true, guards)?.cost)
}

/// Best branch mapping over every pair of branch decompositions.
pub fn delta_b(t1: &AbstractMergeTree, t2: &AbstractMergeTree, guards: &Guards) -> Result<f64> {
    guard("first tree edges", t1.edge_count(), guards.branch_edges)?;
    guard("second tree edges", t2.edge_count(), guards.branch_edges)?;
    let side = |t: &AbstractMergeTree| -> Vec<LabeledTree> {
        all_branch_decompositions(t)
            .iter()
            .map(|bd| {
                obdt_labeled(&OrderedBdt {
                    bdt: Bdt::from_decomposition(t, bd),
                })
            })
            .collect()
    };
    let (a, b) = (side(t1), side(t2));
    let mut best = f64::INFINITY;
    for l1 in &a {
        for l2 in &b {
            best = best.min(selkow_dp_ordered(l1, l2, CostModel::Wasserstein).0);
        }
    }
    Ok(best)
}

/// Distance between two abstract merge trees.
pub fn distance(metric: MetricId, t1: &AbstractMergeTree, t2: &AbstractMergeTree, guards: &Guards) -> Result<f64> {
    match metric {
        MetricId::W => Ok(delta_w(t1, t2)),
        MetricId::X => Ok(delta_x(t1, t2)),
        MetricId::L => Ok(delta_l(t1, t2)),
        MetricId::G => delta_g(t1, t2, guards),
        MetricId::S => delta_s(t1, t2, guards),
        MetricId::E => delta_e(t1, t2, guards),
        MetricId::P => delta_p(t1, t2, guards),
        MetricId::B => delta_b(t1, t2, guards),
    }
}

/// Builds both merge trees and evaluates `metric` with default guards.
pub fn compute(metric: MetricId, f1: &ScalarField, f2: &ScalarField) -> Result<f64> {
    compute_with(metric, f1, f2, &Guards::default())
}

pub fn compute_with(metric: MetricId, f1: &ScalarField, f2: &ScalarField, guards: &Guards) -> Result<f64> {
    let t1 = AbstractMergeTree::from_field(f1)?;
    let t2 = AbstractMergeTree::from_field(f2)?;
    distance(metric, &t1, &t2, guards)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{nine_node_tree, small_tree};

    #[test]
    fn parse_names() {
        assert_eq!("E".parse::<MetricId>().unwrap(), MetricId::E);
        assert_eq!(MetricId::parse_list("e, p,l").unwrap(), vec![MetricId::E, MetricId::P, MetricId::L]);
        assert!("q".parse::<MetricId>().is_err());
    }

    #[test]
    fn zero_on_identical_trees() {
        let g = Guards::default();
        for t in [nine_node_tree(), small_tree(1.0, 2.0)] {
            for m in MetricId::ALL {
                if m == MetricId::B && t.edge_count() > g.branch_edges {
                    continue;
                }
                assert!(distance(m, &t, &t, &g).unwrap().abs() < 1e-12, "{m}");
            }
        }
    }

    #[test]
    fn shifted_field_is_free() {
        let f = ScalarField::on_path(vec![0.0, 3.0, 1.0, 2.0]).unwrap();
        let g = f.with_values(f.values().iter().map(|v| v + 5.0).collect()).unwrap();
        // edge length labels ignore a shift, birth/death labels do not
        for m in [MetricId::E, MetricId::P, MetricId::L, MetricId::G] {
            assert!(compute(m, &f, &g).unwrap().abs() < 1e-12, "{m}");
        }
        assert!(compute(MetricId::W, &f, &g).unwrap() > 1.0);
    }

    #[test]
    fn leaf_change_values() {
        let (a, b) = (small_tree(2.0, 3.0), small_tree(2.0, 3.5));
        let g = Guards::default();
        for m in [MetricId::L, MetricId::G, MetricId::E, MetricId::P] {
            assert!((distance(m, &a, &b, &g).unwrap() - 0.5).abs() < 1e-12, "{m}");
        }
        // the longer branch moves from (6, 9) to (6, 9.5)
        for m in [MetricId::W, MetricId::X, MetricId::B] {
            assert!((distance(m, &a, &b, &g).unwrap() - 0.5).abs() < 1e-12, "{m}");
        }
    }
}
