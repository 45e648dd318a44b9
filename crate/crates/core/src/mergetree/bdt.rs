use serde::Serialize;

use super::branch::{persistence_branch_decomposition, BranchDecomposition};
use super::{AbstractMergeTree, RootedTree};

/// One branch seen as a BDT node. `leaf` and `start` are field vertex ids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BdtNode {
    pub leaf: usize,
    pub start: usize,
    pub birth: f64,
    pub death: f64,
    /// Position of `start` along the parent branch.
    pub attach: usize,
}

/// Branch decomposition tree. Node 0 is the main branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Bdt {
    pub tree: RootedTree,
    pub nodes: Vec<BdtNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SiblingRelation {
    Before,
    After,
    Incomparable,
}

/// A BDT together with the attachment order of sibling branches.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedBdt {
    pub bdt: Bdt,
}

impl Bdt {
    pub fn from_decomposition(tree: &AbstractMergeTree, bd: &BranchDecomposition) -> Self {
        let nodes = bd
            .branches
            .iter()
            .zip(&bd.attach)
            .map(|(b, &attach)| BdtNode {
                leaf: tree.vertex(b.leaf()),
                start: tree.vertex(b.start()),
                birth: b.birth,
                death: b.death,
                attach,
            })
            .collect();
        let tree = RootedTree::from_parents(bd.parent.clone())
            .expect("branch nesting is a tree");
        Self { tree, nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `(child leaf, parent leaf)` pairs, sorted.
    pub fn leaf_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = (0..self.len())
            .filter_map(|i| {
                self.tree
                    .parent(i)
                    .map(|p| (self.nodes[i].leaf, self.nodes[p].leaf))
            })
            .collect();
        e.sort_unstable();
        e
    }
}

impl OrderedBdt {
    /// Relation of two siblings under the attachment order. Branches that
    /// start at the same node are incomparable.
    pub fn relation(&self, a: usize, b: usize) -> SiblingRelation {
        relation_of(&self.bdt.nodes[a], &self.bdt.nodes[b])
    }

    /// Children of `v` grouped by attachment point, groups in ascending order.
    pub fn child_groups(&self, v: usize) -> Vec<Vec<usize>> {
        let mut ch: Vec<usize> = self.bdt.tree.children(v).to_vec();
        ch.sort_by_key(|&c| (self.bdt.nodes[c].attach, c));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for c in ch {
            match groups.last_mut() {
                Some(g) if self.bdt.nodes[g[0]].attach == self.bdt.nodes[c].attach => g.push(c),
                _ => groups.push(vec![c]),
            }
        }
        groups
    }
}

pub(crate) fn relation_of(a: &BdtNode, b: &BdtNode) -> SiblingRelation {
    match a.attach.cmp(&b.attach) {
        std::cmp::Ordering::Less => SiblingRelation::Before,
        std::cmp::Ordering::Greater => SiblingRelation::After,
        std::cmp::Ordering::Equal => SiblingRelation::Incomparable,
    }
}

pub fn build_bdt(tree: &AbstractMergeTree) -> Bdt {
    Bdt::from_decomposition(tree, &persistence_branch_decomposition(tree))
}

pub fn build_obdt(tree: &AbstractMergeTree) -> OrderedBdt {
    OrderedBdt {
        bdt: build_bdt(tree),
    }
}
