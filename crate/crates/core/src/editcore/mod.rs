//! Edit mappings, constraint predicates, cost models and the exact solvers
//! shared by all distances.

mod brute;
mod deform;
mod dp;
mod sequence;

pub use brute::brute_force_distance;
pub use deform::{contract, deform_brute_force, ContractedTree, DeformWitness};
pub use dp::{selkow_dp, selkow_dp_ordered};
pub use sequence::{
    check_deform_sequence, check_sequence, deform_witness_to_sequence, labeled_isomorphic,
    mapping_to_sequence, Attach, DeformOp, DeformSequence, EditOp, EditSequence, NodeKey,
    WorkTree,
};

use serde::{Deserialize, Serialize};

use crate::mergetree::{Label, LabeledTree};

/// Cost of relabelling, deleting and inserting labels. Blank labels only
/// relabel to blank; every other operation on them is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CostModel {
    /// `|l1 - l2|` with the empty label 0.
    AbsDiff,
    /// Euclidean distance of birth-death points; the empty label is the
    /// closest diagonal point.
    Wasserstein,
}

impl CostModel {
    pub fn relabel(&self, a: &Label, b: &Label) -> f64 {
        match (a, b) {
            (Label::Blank, Label::Blank) => 0.0,
            (Label::Blank, _) | (_, Label::Blank) => f64::INFINITY,
            (Label::Scalar(x), Label::Scalar(y)) => (x - y).abs(),
            (
                Label::Point {
                    birth: b1,
                    death: d1,
                },
                Label::Point {
                    birth: b2,
                    death: d2,
                },
            ) => match self {
                CostModel::AbsDiff => (b1 - b2).abs() + (d1 - d2).abs(),
                CostModel::Wasserstein => (b1 - b2).hypot(d1 - d2),
            },
            // a scalar is read as the persistence of a point
            (Label::Scalar(x), p @ Label::Point { .. }) | (p @ Label::Point { .. }, Label::Scalar(x)) => {
                (x - self.delete(p)).abs()
            }
        }
    }

    pub fn delete(&self, a: &Label) -> f64 {
        match *a {
            Label::Blank => f64::INFINITY,
            Label::Scalar(x) => x.abs(),
            Label::Point { birth, death } => match self {
                CostModel::AbsDiff => (death - birth).abs(),
                CostModel::Wasserstein => (death - birth).abs() / std::f64::consts::SQRT_2,
            },
        }
    }

    pub fn insert(&self, b: &Label) -> f64 {
        self.delete(b)
    }
}

/// One-to-one set of node pairs `(v in T1, w in T2)`, sorted by `v`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditMapping {
    pub pairs: Vec<(usize, usize)>,
}

impl EditMapping {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        Self { pairs }
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).map(|v| (v, v)).collect())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Image of every T1 node.
    pub fn forward(&self, n1: usize) -> Vec<Option<usize>> {
        let mut f = vec![None; n1];
        for &(v, w) in &self.pairs {
            f[v] = Some(w);
        }
        f
    }

    /// Preimage of every T2 node.
    pub fn backward(&self, n2: usize) -> Vec<Option<usize>> {
        let mut b = vec![None; n2];
        for &(v, w) in &self.pairs {
            b[w] = Some(v);
        }
        b
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.pairs.iter().map(|&(v, w)| (w, v)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MappingConstraint {
    /// One-to-one and ancestor preserving.
    Tai,
    /// Roots mapped to each other, parents of mapped nodes mapped.
    Selkow,
    /// Ancestor preserving plus the lowest common ancestor condition.
    ZhangConstrained,
    DeformFree,
    DeformOneDegree,
}

/// Size limits of the exponential solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guards {
    /// Node limit of the mapping oracle.
    pub brute_nodes: usize,
    /// Edge limit of the deformation search.
    pub deform_edges: usize,
    /// Edge limit for enumerating branch decompositions.
    pub branch_edges: usize,
    /// Node limit of inclusion tests.
    pub inclusion_nodes: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            brute_nodes: 12,
            deform_edges: 10,
            branch_edges: 8,
            inclusion_nodes: crate::mergetree::INCLUSION_LIMIT,
        }
    }
}

pub(crate) fn guard(what: &'static str, count: usize, limit: usize) -> crate::Result<()> {
    if count > limit {
        Err(crate::Error::Guard { what, count, limit })
    } else {
        Ok(())
    }
}

/// Σ relabel over pairs + Σ delete over unmapped T1 nodes + Σ insert over
/// unmapped T2 nodes.
pub fn mapping_cost(l1: &LabeledTree, l2: &LabeledTree, m: &EditMapping, cost: CostModel) -> f64 {
    let f = m.forward(l1.len());
    let b = m.backward(l2.len());
    let mut total = 0.0;
    for v in 0..l1.len() {
        total += match f[v] {
            Some(w) => cost.relabel(&l1.labels[v], &l2.labels[w]),
            None => cost.delete(&l1.labels[v]),
        };
    }
    for w in 0..l2.len() {
        if b[w].is_none() {
            total += cost.insert(&l2.labels[w]);
        }
    }
    total
}

fn incomparable(t: &crate::mergetree::RootedTree, a: usize, b: usize) -> bool {
    !t.comparable(a, b)
}

/// Full check of a mapping against a constraint. For two ordered trees the
/// relation of mapped sibling pairs must also be kept. Deformation
/// constraints are not mapping based and always return false.
pub fn is_valid_mapping(
    l1: &LabeledTree,
    l2: &LabeledTree,
    m: &EditMapping,
    constraint: MappingConstraint,
) -> bool {
    let (t1, t2) = (&l1.tree, &l2.tree);
    let f = m.forward(l1.len());
    let b = m.backward(l2.len());
    if m.pairs.iter().any(|&(v, w)| v >= l1.len() || w >= l2.len()) {
        return false;
    }
    for &(v, w) in &m.pairs {
        if f[v] != Some(w) || b[w] != Some(v) {
            return false;
        }
    }
    let ps = &m.pairs;
    let ancestor_preserving = ps.iter().all(|&(v1, w1)| {
        ps.iter()
            .all(|&(v2, w2)| t1.is_ancestor(v1, v2) == t2.is_ancestor(w1, w2))
    });
    let ordered_ok = match (l1.is_ordered(), l2.is_ordered()) {
        (true, true) => ps.iter().all(|&(v1, w1)| {
            ps.iter().all(|&(v2, w2)| {
                v1 == v2
                    || t1.parent(v1) != t1.parent(v2)
                    || t2.parent(w1) != t2.parent(w2)
                    || l1.relation(v1, v2) == l2.relation(w1, w2)
            })
        }),
        _ => true,
    };
    if !ordered_ok {
        return false;
    }
    match constraint {
        MappingConstraint::Tai => ancestor_preserving,
        MappingConstraint::ZhangConstrained => {
            ancestor_preserving
                && ps.iter().enumerate().all(|(i, &(v1, w1))| {
                    ps[i + 1..].iter().all(|&(v2, w2)| {
                        let (a, c) = (t1.lca(v1, v2), t2.lca(w1, w2));
                        ps.iter()
                            .all(|&(v3, w3)| incomparable(t1, a, v3) == incomparable(t2, c, w3))
                    })
                })
        }
        MappingConstraint::Selkow => {
            f[t1.root()] == Some(t2.root())
                && ps.iter().all(|&(v, w)| match (t1.parent(v), t2.parent(w)) {
                    (Some(p), Some(q)) => f[p] == Some(q),
                    (None, None) => true,
                    _ => false,
                })
        }
        MappingConstraint::DeformFree | MappingConstraint::DeformOneDegree => false,
    }
}
