use serde::{Deserialize, Serialize};

use super::bdt::{Bdt, OrderedBdt, SiblingRelation};
use super::branch::persistence_branch_decomposition;
use super::{AbstractMergeTree, RootedTree};
use crate::error::{Error, Result};

/// Node or edge label. For edge-labelled schemes the label of a non-root
/// node belongs to the edge towards its parent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Label {
    /// Root marker: only relabels to another blank are finite.
    Blank,
    Scalar(f64),
    Point { birth: f64, death: f64 },
}

impl Label {
    pub fn scalar(&self) -> Option<f64> {
        match *self {
            Label::Scalar(x) => Some(x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LabelScheme {
    EdgeLength,
    NodeDistToParent,
    BdtBirthDeath,
    OrderedBdtBirthDeath,
    BranchLabelOnNodes,
}

impl LabelScheme {
    pub fn name(&self) -> &'static str {
        match self {
            LabelScheme::EdgeLength => "EdgeLength",
            LabelScheme::NodeDistToParent => "NodeDistToParent",
            LabelScheme::BdtBirthDeath => "BdtBirthDeath",
            LabelScheme::OrderedBdtBirthDeath => "OrderedBdtBirthDeath",
            LabelScheme::BranchLabelOnNodes => "BranchLabelOnNodes",
        }
    }
}

/// Rooted tree with one label per node and, for ordered trees, an
/// attachment key per node. Siblings with equal keys are incomparable.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTree {
    pub tree: RootedTree,
    pub labels: Vec<Label>,
    pub scheme: LabelScheme,
    pub order: Option<Vec<usize>>,
    /// Field vertex of each node; for BDTs the vertex of the branch leaf.
    pub names: Vec<usize>,
}

impl LabeledTree {
    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn is_ordered(&self) -> bool {
        self.order.is_some()
    }

    /// Sibling relation; `None` for unordered trees.
    pub fn relation(&self, a: usize, b: usize) -> Option<SiblingRelation> {
        self.order.as_ref().map(|key| match key[a].cmp(&key[b]) {
            std::cmp::Ordering::Less => SiblingRelation::Before,
            std::cmp::Ordering::Greater => SiblingRelation::After,
            std::cmp::Ordering::Equal => SiblingRelation::Incomparable,
        })
    }

    /// Same tree with the order dropped.
    pub fn unordered(&self) -> Self {
        Self {
            order: None,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum LabelSource<'a> {
    Tree(&'a AbstractMergeTree),
    Bdt(&'a Bdt),
    Obdt(&'a OrderedBdt),
}

fn bdt_labels(bdt: &Bdt) -> Vec<Label> {
    bdt.nodes
        .iter()
        .map(|n| Label::Point {
            birth: n.birth,
            death: n.death,
        })
        .collect()
}

fn branch_labels(tree: &AbstractMergeTree) -> Vec<Label> {
    let bd = persistence_branch_decomposition(tree);
    let t = tree.tree();
    let mut best: Vec<Option<usize>> = vec![None; t.len()];
    for (i, b) in bd.branches.iter().enumerate() {
        let s = b.start();
        let better = match best[s] {
            None => true,
            Some(j) => {
                let o = &bd.branches[j];
                b.persistence() > o.persistence()
                    || (b.persistence() == o.persistence()
                        && tree.vertex(b.leaf()) < tree.vertex(o.leaf()))
            }
        };
        if better {
            best[s] = Some(i);
        }
    }
    (0..t.len())
        .map(|v| {
            let b = if t.is_leaf(v) {
                &bd.branches[bd.node_branch[v]]
            } else {
                &bd.branches[best[v].expect("inner nodes start a branch")]
            };
            Label::Point {
                birth: b.birth,
                death: b.death,
            }
        })
        .collect()
}

pub fn label_for_scheme(src: LabelSource<'_>, scheme: LabelScheme) -> Result<LabeledTree> {
    match (src, scheme) {
        (LabelSource::Tree(t), LabelScheme::EdgeLength | LabelScheme::NodeDistToParent) => {
            let root = t.root();
            let labels = (0..t.len())
                .map(|v| {
                    if v == root {
                        Label::Blank
                    } else {
                        Label::Scalar(t.edge_length(v))
                    }
                })
                .collect();
            Ok(LabeledTree {
                tree: t.tree().clone(),
                labels,
                scheme,
                order: None,
                names: t.vertices().to_vec(),
            })
        }
        (LabelSource::Tree(t), LabelScheme::BranchLabelOnNodes) => Ok(LabeledTree {
            tree: t.tree().clone(),
            labels: branch_labels(t),
            scheme,
            order: None,
            names: t.vertices().to_vec(),
        }),
        (LabelSource::Bdt(b), LabelScheme::BdtBirthDeath) => Ok(LabeledTree {
            tree: b.tree.clone(),
            labels: bdt_labels(b),
            scheme,
            order: None,
            names: b.nodes.iter().map(|n| n.leaf).collect(),
        }),
        (LabelSource::Obdt(o), LabelScheme::OrderedBdtBirthDeath) => Ok(LabeledTree {
            tree: o.bdt.tree.clone(),
            labels: bdt_labels(&o.bdt),
            scheme,
            order: Some(o.bdt.nodes.iter().map(|n| n.attach).collect()),
            names: o.bdt.nodes.iter().map(|n| n.leaf).collect(),
        }),
        (_, s) => Err(Error::SchemeMismatch(s.name())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::nine_node_tree;
    use crate::mergetree::{build_bdt, build_obdt};

    fn by_vertex(lt: &LabeledTree) -> Vec<Label> {
        let mut out = vec![Label::Blank; lt.len()];
        for (i, &v) in lt.names.iter().enumerate() {
            out[v] = lt.labels[i];
        }
        out
    }

    #[test]
    fn edge_lengths() {
        let t = nine_node_tree();
        let lt = label_for_scheme(LabelSource::Tree(&t), LabelScheme::EdgeLength).unwrap();
        let got = by_vertex(&lt);
        // B..I; the edge B-F spans 2 -> 5
        let want = [2.0, 2.0, 2.0, 6.0, 3.0, 2.0, 2.5, 3.0];
        for (v, w) in want.iter().enumerate() {
            assert_eq!(got[v + 1], Label::Scalar(*w));
        }
        let total: f64 = got.iter().filter_map(Label::scalar).sum();
        let bd = persistence_branch_decomposition(&t);
        let pers: f64 = bd.branches.iter().map(|b| b.persistence()).sum();
        assert!((total - pers).abs() < 1e-12);
    }

    #[test]
    fn node_distances_root_blank() {
        let t = nine_node_tree();
        let lt = label_for_scheme(LabelSource::Tree(&t), LabelScheme::NodeDistToParent).unwrap();
        let got = by_vertex(&lt);
        assert_eq!(got[0], Label::Blank);
        let want = [2.0, 2.0, 2.0, 6.0, 3.0, 2.0, 2.5, 3.0];
        for (v, w) in want.iter().enumerate() {
            assert_eq!(got[v + 1], Label::Scalar(*w));
        }
    }

    #[test]
    fn branch_labels_on_nodes() {
        let t = nine_node_tree();
        let lt = label_for_scheme(LabelSource::Tree(&t), LabelScheme::BranchLabelOnNodes).unwrap();
        let got = by_vertex(&lt);
        let want = [
            (10.0, 0.0),
            (5.0, 2.0),
            (9.0, 4.0),
            (8.5, 6.0),
            (10.0, 0.0),
            (5.0, 2.0),
            (8.0, 6.0),
            (8.5, 6.0),
            (9.0, 4.0),
        ];
        for (v, &(death, birth)) in want.iter().enumerate() {
            assert_eq!(got[v], Label::Point { birth, death }, "vertex {v}");
        }
    }

    #[test]
    fn mismatched_scheme() {
        let t = nine_node_tree();
        let b = build_bdt(&t);
        assert!(label_for_scheme(LabelSource::Bdt(&b), LabelScheme::EdgeLength).is_err());
        assert!(label_for_scheme(LabelSource::Tree(&t), LabelScheme::BdtBirthDeath).is_err());
        let o = build_obdt(&t);
        let lo = label_for_scheme(LabelSource::Obdt(&o), LabelScheme::OrderedBdtBirthDeath).unwrap();
        assert!(lo.is_ordered());
    }
}
