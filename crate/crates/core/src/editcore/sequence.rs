use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::deform::DeformWitness;
use super::{CostModel, EditMapping};
use crate::error::{Error, Result};
use crate::mergetree::{AbstractMergeTree, Label, LabeledTree};
use crate::TAU;

/// Node of a tree being edited: `A(i)` is node `i` of the source tree,
/// `B(j)` is node `j` of the target tree, inserted on the way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NodeKey {
    A(usize),
    B(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EditOp {
    /// Removes the node; its children move to its parent (or become roots).
    Delete { node: NodeKey, label: Label, cost: f64 },
    /// Adds a node below `parent` (a new root if `None`) that takes over the
    /// listed children of `parent`.
    Insert {
        node: NodeKey,
        label: Label,
        parent: Option<NodeKey>,
        adopt: Vec<NodeKey>,
        cost: f64,
    },
    Relabel { node: NodeKey, from: Label, to: Label, cost: f64 },
}

impl EditOp {
    pub fn cost(&self) -> f64 {
        match *self {
            EditOp::Delete { cost, .. } | EditOp::Insert { cost, .. } | EditOp::Relabel { cost, .. } => cost,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EditSequence {
    pub ops: Vec<EditOp>,
}

impl EditSequence {
    pub fn cost(&self) -> f64 {
        self.ops.iter().map(EditOp::cost).sum()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Where a new edge goes in a deformation insert.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Attach {
    /// Below an existing node, taking over `adopt` (never exactly one child).
    Node { parent: NodeKey, adopt: Vec<NodeKey> },
    /// On a new saddle splitting the edge above `child`, which keeps
    /// `child_len` of its length.
    Split {
        child: NodeKey,
        saddle: NodeKey,
        child_len: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DeformOp {
    /// Contracts the edge above `node`. A parent left with a single child is
    /// pruned and its length added to that child.
    DeleteEdge { node: NodeKey, cost: f64 },
    Insert {
        node: NodeKey,
        attach: Attach,
        len: f64,
        cost: f64,
    },
    Relabel { node: NodeKey, from: f64, to: f64, cost: f64 },
}

impl DeformOp {
    pub fn cost(&self) -> f64 {
        match *self {
            DeformOp::DeleteEdge { cost, .. } | DeformOp::Insert { cost, .. } | DeformOp::Relabel { cost, .. } => {
                cost
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DeformSequence {
    pub ops: Vec<DeformOp>,
}

impl DeformSequence {
    pub fn cost(&self) -> f64 {
        self.ops.iter().map(DeformOp::cost).sum()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkNode {
    pub label: Label,
    pub parent: Option<NodeKey>,
    pub children: Vec<NodeKey>,
}

/// Labelled forest an edit sequence is applied to.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WorkTree {
    pub nodes: BTreeMap<NodeKey, WorkNode>,
}

fn fail<T>(step: usize, reason: impl Into<String>) -> Result<T> {
    Err(Error::Inapplicable {
        step,
        reason: reason.into(),
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TAU * (1.0 + a.abs().max(b.abs()))
}

fn labels_close(a: &Label, b: &Label) -> bool {
    match (a, b) {
        (Label::Blank, Label::Blank) => true,
        (Label::Scalar(x), Label::Scalar(y)) => close(*x, *y),
        (
            Label::Point {
                birth: b1,
                death: d1,
            },
            Label::Point {
                birth: b2,
                death: d2,
            },
        ) => close(*b1, *b2) && close(*d1, *d2),
        _ => false,
    }
}

impl WorkTree {
    pub fn from_labeled(l: &LabeledTree) -> Self {
        let mut nodes = BTreeMap::new();
        for v in 0..l.len() {
            nodes.insert(
                NodeKey::A(v),
                WorkNode {
                    label: l.labels[v],
                    parent: l.tree.parent(v).map(NodeKey::A),
                    children: l.tree.children(v).iter().map(|&c| NodeKey::A(c)).collect(),
                },
            );
        }
        Self { nodes }
    }

    /// Edge-length labelled copy of a merge tree; the root is blank.
    pub fn from_merge_tree(t: &AbstractMergeTree) -> Self {
        let tr = t.tree();
        let mut nodes = BTreeMap::new();
        for v in 0..t.len() {
            nodes.insert(
                NodeKey::A(v),
                WorkNode {
                    label: if v == tr.root() {
                        Label::Blank
                    } else {
                        Label::Scalar(t.edge_length(v))
                    },
                    parent: tr.parent(v).map(NodeKey::A),
                    children: tr.children(v).iter().map(|&c| NodeKey::A(c)).collect(),
                },
            );
        }
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn roots(&self) -> Vec<NodeKey> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.parent.is_none())
            .map(|(&k, _)| k)
            .collect()
    }

    pub fn get(&self, k: NodeKey) -> Option<&WorkNode> {
        self.nodes.get(&k)
    }

    fn length(&self, k: NodeKey) -> f64 {
        self.nodes[&k].label.scalar().unwrap_or(0.0)
    }

    fn siblings_mut(&mut self, parent: Option<NodeKey>) -> Option<&mut Vec<NodeKey>> {
        parent.map(|p| &mut self.nodes.get_mut(&p).unwrap().children)
    }

    /// Removes `k`, handing its children to its parent.
    fn remove(&mut self, k: NodeKey) {
        let node = self.nodes.remove(&k).unwrap();
        if let Some(sib) = self.siblings_mut(node.parent) {
            sib.retain(|&c| c != k);
            sib.extend_from_slice(&node.children);
        }
        for c in &node.children {
            self.nodes.get_mut(c).unwrap().parent = node.parent;
        }
    }

    fn add(&mut self, k: NodeKey, label: Label, parent: Option<NodeKey>, adopt: &[NodeKey]) {
        if let Some(sib) = self.siblings_mut(parent) {
            sib.retain(|c| !adopt.contains(c));
            sib.push(k);
        }
        for c in adopt {
            self.nodes.get_mut(c).unwrap().parent = Some(k);
        }
        self.nodes.insert(
            k,
            WorkNode {
                label,
                parent,
                children: adopt.to_vec(),
            },
        );
    }

    fn apply_edit(&mut self, step: usize, op: &EditOp, cost: CostModel) -> Result<()> {
        match op {
            EditOp::Delete { node, label, cost: c } => {
                let Some(n) = self.nodes.get(node) else {
                    return fail(step, format!("{node:?} does not exist"));
                };
                if !labels_close(&n.label, label) || !close(*c, cost.delete(label)) {
                    return fail(step, "recorded label or cost does not match");
                }
                self.remove(*node);
            }
            EditOp::Insert {
                node,
                label,
                parent,
                adopt,
                cost: c,
            } => {
                if self.nodes.contains_key(node) {
                    return fail(step, format!("{node:?} already exists"));
                }
                if let Some(p) = parent {
                    if !self.nodes.contains_key(p) {
                        return fail(step, format!("parent {p:?} does not exist"));
                    }
                }
                let current = match parent {
                    Some(p) => self.nodes[p].children.clone(),
                    None => self.roots(),
                };
                if adopt.iter().any(|a| !current.contains(a)) {
                    return fail(step, "adopted node is not a child of the parent");
                }
                if !close(*c, cost.insert(label)) {
                    return fail(step, "recorded cost does not match");
                }
                self.add(*node, *label, *parent, adopt);
            }
            EditOp::Relabel { node, from, to, cost: c } => {
                let Some(n) = self.nodes.get_mut(node) else {
                    return fail(step, format!("{node:?} does not exist"));
                };
                if !labels_close(&n.label, from) || !close(*c, cost.relabel(from, to)) {
                    return fail(step, "recorded label or cost does not match");
                }
                n.label = *to;
            }
        }
        Ok(())
    }

    /// Contracts the edge above `k`; returns the pruned parent and the child
    /// that absorbed it together with that child's previous length.
    fn contract_edge(&mut self, k: NodeKey) -> Option<(NodeKey, NodeKey, f64)> {
        let p = self.nodes[&k].parent.expect("root has no edge");
        self.remove(k);
        let pn = &self.nodes[&p];
        if pn.parent.is_none() || pn.children.len() != 1 {
            return None;
        }
        let r = pn.children[0];
        let before = self.length(r);
        let merged = before + self.length(p);
        self.remove(p);
        self.nodes.get_mut(&r).unwrap().label = Label::Scalar(merged);
        Some((p, r, before))
    }

    fn apply_deform(&mut self, step: usize, op: &DeformOp) -> Result<()> {
        match op {
            DeformOp::DeleteEdge { node, cost } => {
                let Some(n) = self.nodes.get(node) else {
                    return fail(step, format!("{node:?} does not exist"));
                };
                if n.parent.is_none() {
                    return fail(step, "the root has no edge to delete");
                }
                if !close(*cost, self.length(*node)) {
                    return fail(step, "recorded cost does not match the edge length");
                }
                self.contract_edge(*node);
            }
            DeformOp::Insert {
                node,
                attach,
                len,
                cost,
            } => {
                if self.nodes.contains_key(node) {
                    return fail(step, format!("{node:?} already exists"));
                }
                if *len < -TAU || !close(*cost, *len) {
                    return fail(step, "invalid length or cost");
                }
                match attach {
                    Attach::Node { parent, adopt } => {
                        let Some(pn) = self.nodes.get(parent) else {
                            return fail(step, format!("parent {parent:?} does not exist"));
                        };
                        if adopt.len() == 1 {
                            return fail(step, "adopting one child leaves a regular node");
                        }
                        if adopt.iter().any(|a| !pn.children.contains(a)) {
                            return fail(step, "adopted node is not a child of the parent");
                        }
                        if adopt.is_empty() && pn.parent.is_some() && pn.children.is_empty() {
                            return fail(step, "a leaf cannot receive a single child");
                        }
                        self.add(*node, Label::Scalar(*len), Some(*parent), adopt);
                    }
                    Attach::Split {
                        child,
                        saddle,
                        child_len,
                    } => {
                        let Some(cn) = self.nodes.get(child) else {
                            return fail(step, format!("{child:?} does not exist"));
                        };
                        let Some(cp) = cn.parent else {
                            return fail(step, "cannot split above the root");
                        };
                        let total = self.length(*child);
                        if self.nodes.contains_key(saddle) || *child_len < -TAU || *child_len > total + TAU {
                            return fail(step, "invalid split");
                        }
                        self.add(*saddle, Label::Scalar(total - child_len), Some(cp), &[*child]);
                        self.nodes.get_mut(child).unwrap().label = Label::Scalar(*child_len);
                        self.add(*node, Label::Scalar(*len), Some(*saddle), &[]);
                    }
                }
            }
            DeformOp::Relabel { node, from, to, cost } => {
                let Some(n) = self.nodes.get(node) else {
                    return fail(step, format!("{node:?} does not exist"));
                };
                if n.parent.is_none() {
                    return fail(step, "the root carries no length");
                }
                if !close(self.length(*node), *from) || !close(*cost, (from - to).abs()) || *to < -TAU {
                    return fail(step, "recorded length or cost does not match");
                }
                self.nodes.get_mut(node).unwrap().label = Label::Scalar(*to);
            }
        }
        Ok(())
    }
}

/// Applies a classic edit sequence to `l1`. Every operation is checked
/// against the current tree; the first bad one is reported by its 1-based
/// position.
pub fn check_sequence(l1: &LabeledTree, seq: &EditSequence, cost: CostModel) -> Result<WorkTree> {
    let mut w = WorkTree::from_labeled(l1);
    for (i, op) in seq.ops.iter().enumerate() {
        w.apply_edit(i + 1, op, cost)?;
    }
    Ok(w)
}

/// Applies a deformation sequence to the edge-length labelled `t1`.
pub fn check_deform_sequence(t1: &AbstractMergeTree, seq: &DeformSequence) -> Result<WorkTree> {
    let mut w = WorkTree::from_merge_tree(t1);
    for (i, op) in seq.ops.iter().enumerate() {
        w.apply_deform(i + 1, op)?;
    }
    Ok(w)
}

/// Unordered isomorphism of a work tree with a labelled tree, labels equal
/// up to `TAU`.
pub fn labeled_isomorphic(w: &WorkTree, l: &LabeledTree) -> bool {
    let roots = w.roots();
    if roots.len() != 1 || w.len() != l.len() {
        return false;
    }
    fn iso(w: &WorkTree, a: NodeKey, l: &LabeledTree, b: usize) -> bool {
        let na = &w.nodes[&a];
        let cb = l.tree.children(b);
        if !labels_close(&na.label, &l.labels[b]) || na.children.len() != cb.len() {
            return false;
        }
        let ok: Vec<Vec<bool>> = na
            .children
            .iter()
            .map(|&x| cb.iter().map(|&y| iso(w, x, l, y)).collect())
            .collect();
        fn assign(i: usize, ok: &[Vec<bool>], used: &mut [bool]) -> bool {
            if i == ok.len() {
                return true;
            }
            for j in 0..used.len() {
                if ok[i][j] && !used[j] {
                    used[j] = true;
                    if assign(i + 1, ok, used) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        assign(0, &ok, &mut vec![false; cb.len()])
    }
    iso(w, roots[0], l, l.tree.root())
}

/// Deletions (leaves first), then relabels, then insertions (root first)
/// realising an ancestor preserving mapping.
pub fn mapping_to_sequence(
    l1: &LabeledTree,
    l2: &LabeledTree,
    m: &EditMapping,
    cost: CostModel,
) -> Result<EditSequence> {
    if !super::is_valid_mapping(l1, l2, m, super::MappingConstraint::Tai) {
        return Err(Error::InconsistentMapping(
            "mapping is not one-to-one and ancestor preserving".into(),
        ));
    }
    let f = m.forward(l1.len());
    let b = m.backward(l2.len());
    let mut ops = Vec::new();
    for &v in l1.tree.postorder() {
        if f[v].is_none() {
            ops.push(EditOp::Delete {
                node: NodeKey::A(v),
                label: l1.labels[v],
                cost: cost.delete(&l1.labels[v]),
            });
        }
    }
    for &(v, w) in &m.pairs {
        let (from, to) = (l1.labels[v], l2.labels[w]);
        if from != to {
            ops.push(EditOp::Relabel {
                node: NodeKey::A(v),
                from,
                to,
                cost: cost.relabel(&from, &to),
            });
        }
    }
    // simulate to know the current children when inserting
    let mut work = WorkTree::from_labeled(l1);
    for (i, op) in ops.iter().enumerate() {
        work.apply_edit(i + 1, op, cost)?;
    }
    let key_of = |w: usize| b[w].map_or(NodeKey::B(w), NodeKey::A);
    let identity = |k: NodeKey| match k {
        NodeKey::A(v) => f[v].expect("only mapped source nodes remain"),
        NodeKey::B(w) => w,
    };
    for &w in l2.tree.preorder() {
        if b[w].is_some() {
            continue;
        }
        let parent = l2.tree.parent(w).map(key_of);
        let current = match parent {
            Some(p) => work.nodes[&p].children.clone(),
            None => work.roots(),
        };
        let adopt: Vec<NodeKey> = current
            .into_iter()
            .filter(|&k| l2.tree.is_ancestor(w, identity(k)))
            .collect();
        let op = EditOp::Insert {
            node: NodeKey::B(w),
            label: l2.labels[w],
            parent,
            adopt,
            cost: cost.insert(&l2.labels[w]),
        };
        work.apply_edit(ops.len() + 1, &op, cost)?;
        ops.push(op);
    }
    Ok(EditSequence { ops })
}

/// Record of one edge deletion while reducing a tree to its contracted form.
struct Removal {
    node: NodeKey,
    parent: NodeKey,
    children: Vec<NodeKey>,
    len: f64,
    pruned: Option<(NodeKey, NodeKey, f64)>,
}

/// Reduces `t` by the contracted set `d` and returns the operations, the
/// final work tree and, per surviving work node, the original nodes it
/// stands for.
fn reduce(t: &AbstractMergeTree, d: &[usize]) -> (Vec<Removal>, WorkTree, BTreeMap<NodeKey, BTreeSet<usize>>) {
    let tr = t.tree();
    let in_d: BTreeSet<usize> = d.iter().copied().collect();
    let full: Vec<bool> = (0..t.len())
        .map(|v| tr.subtree(v).iter().all(|u| in_d.contains(u)))
        .collect();
    let mut work = WorkTree::from_merge_tree(t);
    let mut rep: BTreeMap<NodeKey, BTreeSet<usize>> =
        (0..t.len()).map(|v| (NodeKey::A(v), BTreeSet::from([v]))).collect();
    let mut log = Vec::new();
    let mut remove = |work: &mut WorkTree, rep: &mut BTreeMap<NodeKey, BTreeSet<usize>>, k: NodeKey| {
        let n = &work.nodes[&k];
        let (parent, children, len) = (n.parent.unwrap(), n.children.clone(), work.length(k));
        let pruned = work.contract_edge(k);
        rep.remove(&k);
        if let Some((p, r, _)) = pruned {
            let absorbed = rep.remove(&p).unwrap();
            rep.get_mut(&r).unwrap().extend(absorbed);
        }
        log.push(Removal {
            node: k,
            parent,
            children,
            len,
            pruned,
        });
    };
    // inner edges that keep part of their subtree, top down
    for &v in tr.preorder() {
        if in_d.contains(&v) && !tr.is_leaf(v) && !full[v] {
            remove(&mut work, &mut rep, NodeKey::A(v));
        }
    }
    // whole subtrees, leaves first; a node still standing for a kept edge
    // is left for the relabel step
    for &v in tr.postorder() {
        let k = NodeKey::A(v);
        if !in_d.contains(&v) || !full[v] || !work.nodes.contains_key(&k) {
            continue;
        }
        if rep[&k].iter().all(|u| in_d.contains(u)) {
            remove(&mut work, &mut rep, k);
        }
    }
    (log, work, rep)
}

/// Turns an optimal deformation into operations: contractions and leaf
/// deletions on T1, relabels of the surviving edges, then the inverse of
/// the reduction of T2.
pub fn deform_witness_to_sequence(
    t1: &AbstractMergeTree,
    t2: &AbstractMergeTree,
    wit: &DeformWitness,
) -> Result<DeformSequence> {
    let (log1, work1, rep1) = reduce(t1, &wit.d1);
    let (log2, work2, rep2) = reduce(t2, &wit.d2);
    let survivor = |rep: &BTreeMap<NodeKey, BTreeSet<usize>>, alive: &[bool]| -> BTreeMap<usize, NodeKey> {
        let mut out = BTreeMap::new();
        for (&k, set) in rep {
            let s: Vec<usize> = set.iter().copied().filter(|&u| alive[u]).collect();
            if s.len() == 1 {
                out.insert(s[0], k);
            }
        }
        out
    };
    let s1 = survivor(&rep1, &wit.c1.alive);
    let s2 = survivor(&rep2, &wit.c2.alive);
    let bad = || Error::InconsistentMapping("reduced tree does not match the contracted tree".into());
    if s1.len() != work1.len() || s2.len() != work2.len() || work1.len() != wit.pairs.len() {
        return Err(bad());
    }
    let mut ops: Vec<DeformOp> = log1
        .iter()
        .map(|r| DeformOp::DeleteEdge {
            node: r.node,
            cost: r.len,
        })
        .collect();
    // work2 key -> work1 key
    let mut tr: BTreeMap<NodeKey, NodeKey> = BTreeMap::new();
    for &(a, b) in &wit.pairs {
        let (k1, k2) = (*s1.get(&a).ok_or_else(bad)?, *s2.get(&b).ok_or_else(bad)?);
        tr.insert(k2, k1);
        if work1.nodes[&k1].parent.is_none() {
            continue;
        }
        let (from, to) = (work1.length(k1), work2.length(k2));
        if from != to {
            ops.push(DeformOp::Relabel {
                node: k1,
                from,
                to,
                cost: (from - to).abs(),
            });
        }
    }
    // nodes of T2 that do not survive are inserted under their own names
    let key = |k: NodeKey| -> NodeKey {
        match (tr.get(&k), k) {
            (Some(&x), _) => x,
            (None, NodeKey::A(j)) => NodeKey::B(j),
            (None, other) => other,
        }
    };
    for r in log2.iter().rev() {
        let attach = match r.pruned {
            Some((p, child, before)) => Attach::Split {
                child: key(child),
                saddle: key(p),
                child_len: before,
            },
            None => Attach::Node {
                parent: key(r.parent),
                adopt: r.children.iter().map(|&c| key(c)).collect(),
            },
        };
        ops.push(DeformOp::Insert {
            node: key(r.node),
            attach,
            len: r.len,
            cost: r.len,
        });
    }
    Ok(DeformSequence { ops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::editcore::{deform_brute_force, Guards};
    use crate::fixtures::{nine_node_tree, small_tree};
    use crate::mergetree::{label_for_scheme, LabelScheme, LabelSource};

    fn edge_labeled(t: &AbstractMergeTree) -> LabeledTree {
        label_for_scheme(LabelSource::Tree(t), LabelScheme::EdgeLength).unwrap()
    }

    #[test]
    fn identity_gives_empty_sequence() {
        let l = edge_labeled(&nine_node_tree());
        let s = mapping_to_sequence(&l, &l, &EditMapping::identity(l.len()), CostModel::AbsDiff).unwrap();
        assert!(s.is_empty());
        let w = check_sequence(&l, &s, CostModel::AbsDiff).unwrap();
        assert!(labeled_isomorphic(&w, &l));
    }

    #[test]
    fn empty_mapping_deletes_and_inserts_everything() {
        let t = small_tree(1.0, 2.0);
        let l = label_for_scheme(LabelSource::Tree(&t), LabelScheme::BranchLabelOnNodes).unwrap();
        let s = mapping_to_sequence(&l, &l, &EditMapping::default(), CostModel::Wasserstein).unwrap();
        assert_eq!(s.len(), 2 * l.len());
        let w = check_sequence(&l, &s, CostModel::Wasserstein).unwrap();
        assert!(labeled_isomorphic(&w, &l));
    }

    #[test]
    fn deleting_missing_node_fails_at_first_step() {
        let l = edge_labeled(&small_tree(1.0, 2.0));
        let s = EditSequence {
            ops: vec![EditOp::Delete {
                node: NodeKey::B(7),
                label: Label::Scalar(1.0),
                cost: 1.0,
            }],
        };
        assert!(matches!(
            check_sequence(&l, &s, CostModel::AbsDiff),
            Err(Error::Inapplicable { step: 1, .. })
        ));
    }

    #[test]
    fn deform_sequences_reach_the_target() {
        let trees = [
            small_tree(1.0, 2.0),
            small_tree(1.5, 4.0),
            nine_node_tree(),
            AbstractMergeTree::from_edges(&[(0, 0.0), (1, 3.0)], &[(1, 0)]).unwrap(),
        ];
        for a in &trees {
            for b in &trees {
                for od in [false, true] {
                    let wit = deform_brute_force(a, b, od, &Guards::default()).unwrap();
                    let seq = deform_witness_to_sequence(a, b, &wit).unwrap();
                    let w = check_deform_sequence(a, &seq).unwrap();
                    assert!(labeled_isomorphic(&w, &edge_labeled(b)));
                    assert!(seq.cost() <= wit.cost + 1e-9);
                }
            }
        }
    }
}
