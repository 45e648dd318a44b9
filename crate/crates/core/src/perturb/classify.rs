use serde::Serialize;

use super::{check_minimal, ChangeClass, MinimalPerturbation};
use crate::error::Result;
use crate::field::ScalarField;
use crate::mergetree::{
    bdt_included, build_bdt, merge_tree_included, AbstractMergeTree, Renaming, INCLUSION_LIMIT,
};
use crate::TAU;

/// Size and shape facts about the two trees, compared with the pattern each
/// class must follow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeEvidence {
    pub nodes: (usize, usize),
    pub bdt_nodes: (usize, usize),
    /// Same vertex set and same edges by vertex id.
    pub same_structure: bool,
    /// Vertices whose edge length differs (only meaningful with the same
    /// structure).
    pub changed_lengths: usize,
    /// Moved vertex and partner are leaves of both trees.
    pub pair_leaves: bool,
    /// Moved vertex and partner are adjacent saddles in one of the trees.
    pub pair_adjacent_saddles: bool,
    /// The evidence matches the pattern expected for the class.
    pub consistent: bool,
}

impl ShapeEvidence {
    pub fn node_delta(&self) -> usize {
        self.nodes.0.abs_diff(self.nodes.1)
    }

    pub fn bdt_delta(&self) -> usize {
        self.bdt_nodes.0.abs_diff(self.bdt_nodes.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub class: ChangeClass,
    pub perturbation: Option<MinimalPerturbation>,
    pub tree_included: bool,
    pub obdt_included: bool,
    pub bdt_included: bool,
    pub shape: ShapeEvidence,
}

fn is_saddle(t: &AbstractMergeTree, v: usize) -> bool {
    t.node_of_vertex(v)
        .is_some_and(|n| n != t.root() && t.tree().children(n).len() >= 2)
}

fn is_leaf(t: &AbstractMergeTree, v: usize) -> bool {
    t.node_of_vertex(v).is_some_and(|n| t.tree().is_leaf(n))
}

fn adjacent(t: &AbstractMergeTree, a: usize, b: usize) -> bool {
    let e = t.vertex_edges();
    e.contains(&(a, b)) || e.contains(&(b, a))
}

fn evidence(
    class: ChangeClass,
    p: Option<&MinimalPerturbation>,
    t1: &AbstractMergeTree,
    t2: &AbstractMergeTree,
    b1: usize,
    b2: usize,
) -> ShapeEvidence {
    let mut v1 = t1.vertices().to_vec();
    let mut v2 = t2.vertices().to_vec();
    v1.sort_unstable();
    v2.sort_unstable();
    let same_structure = v1 == v2 && t1.vertex_edges() == t2.vertex_edges();
    let changed_lengths = if same_structure {
        (0..t1.len())
            .filter(|&n| {
                let m = t2.node_of_vertex(t1.vertex(n)).unwrap();
                (t1.edge_length(n) - t2.edge_length(m)).abs() > TAU
            })
            .count()
    } else {
        0
    };
    let pair = p.and_then(|p| p.swap_partner.map(|y| (p.vertex, y)));
    let pair_leaves = pair.is_some_and(|(x, y)| {
        [t1, t2].iter().all(|t| is_leaf(t, x) && is_leaf(t, y))
    });
    let pair_adjacent_saddles = pair.is_some_and(|(x, y)| {
        [t1, t2]
            .iter()
            .any(|t| adjacent(t, x, y) && is_saddle(t, x) && is_saddle(t, y))
    });
    let mut ev = ShapeEvidence {
        nodes: (t1.len(), t2.len()),
        bdt_nodes: (b1, b2),
        same_structure,
        changed_lengths,
        pair_leaves,
        pair_adjacent_saddles,
        consistent: false,
    };
    // edges are nodes - 1 in both kinds of tree, so node deltas cover both
    let (dv, db) = (ev.node_delta(), ev.bdt_delta());
    ev.consistent = match class {
        ChangeClass::SimpleChange => (dv, db) == (0, 0) || (dv, db) == (1, 1),
        ChangeClass::EdgeSplit => dv == 2 && db == 1,
        ChangeClass::VerticalSwap => same_structure && pair_leaves && changed_lengths == 1,
        ChangeClass::OrderedHorizontalSwap | ChangeClass::UnorderedHorizontalSwap => {
            pair_adjacent_saddles && dv <= 1
        }
    };
    ev
}

/// Classifies the change between the merge trees of two fields that differ
/// by a minimal perturbation. Inclusions are tested in both directions with
/// the moved vertex and its partner allowed to trade names.
pub fn classify_change(f: &ScalarField, f2: &ScalarField) -> Result<Classification> {
    let p = check_minimal(f, f2)?;
    let t1 = AbstractMergeTree::from_field(f)?;
    let t2 = AbstractMergeTree::from_field(f2)?;
    let (b1, b2) = (build_bdt(&t1), build_bdt(&t2));
    let ren = Renaming::new(p.map(|p| p.exempt()).unwrap_or_default());
    let lim = INCLUSION_LIMIT;
    let tree_included =
        merge_tree_included(&t1, &t2, &ren, lim)? || merge_tree_included(&t2, &t1, &ren, lim)?;
    let obdt_included = bdt_included(&b1, &b2, true, &ren, lim)? || bdt_included(&b2, &b1, true, &ren, lim)?;
    let bdt_incl = bdt_included(&b1, &b2, false, &ren, lim)? || bdt_included(&b2, &b1, false, &ren, lim)?;
    let class = match (tree_included, obdt_included) {
        _ if p.is_none() => ChangeClass::SimpleChange,
        (true, true) => ChangeClass::SimpleChange,
        (true, false) => ChangeClass::VerticalSwap,
        (false, true) => ChangeClass::EdgeSplit,
        (false, false) if bdt_incl => ChangeClass::OrderedHorizontalSwap,
        (false, false) => ChangeClass::UnorderedHorizontalSwap,
    };
    let shape = evidence(class, p.as_ref(), &t1, &t2, b1.len(), b2.len());
    Ok(Classification {
        class,
        perturbation: p,
        tree_included,
        obdt_included,
        bdt_included: bdt_incl,
        shape,
    })
}
