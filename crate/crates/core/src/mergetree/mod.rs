//! Split trees of scalar fields and the structures derived from them.

mod bdt;
mod branch;
mod inclusion;
mod labels;

pub use bdt::{build_bdt, build_obdt, Bdt, BdtNode, OrderedBdt, SiblingRelation};
pub use branch::{
    all_branch_decompositions, decomposition_with_choices, persistence_branch_decomposition,
    Branch, BranchDecomposition,
};
pub use inclusion::{
    bdt_included, merge_tree_included, tree_included_up_to_iso, Renaming, INCLUSION_LIMIT,
};
pub use labels::{label_for_scheme, Label, LabelScheme, LabeledTree, LabelSource};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Shape of a rooted tree over node indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
    depth: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    pre: Vec<usize>,
    post: Vec<usize>,
}

impl RootedTree {
    /// Builds the tree from parent pointers. Children are kept in ascending
    /// index order.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvariantViolation("empty tree".into()));
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvariantViolation(format!(
                "expected one root, found {}",
                roots.len()
            )));
        }
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::InvariantViolation(format!("parent {p} out of range")));
                }
                children[p].push(i);
            }
        }
        let root = roots[0];
        let mut depth = vec![0; n];
        let mut tin = vec![usize::MAX; n];
        let mut tout = vec![0; n];
        let mut clock = 0;
        let mut pre = Vec::with_capacity(n);
        let mut post = Vec::with_capacity(n);
        let mut stack = vec![(root, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                tout[v] = clock;
                post.push(v);
                continue;
            }
            if tin[v] != usize::MAX {
                break;
            }
            tin[v] = clock;
            pre.push(v);
            clock += 1;
            stack.push((v, true));
            for &c in children[v].iter().rev() {
                depth[c] = depth[v] + 1;
                stack.push((c, false));
            }
        }
        if clock != n {
            return Err(Error::InvariantViolation("parent pointers contain a cycle".into()));
        }
        Ok(Self {
            parent,
            children,
            root,
            depth,
            tin,
            tout,
            pre,
            post,
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Strict ancestor test.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        a != b && self.tin[a] <= self.tin[b] && self.tout[b] <= self.tout[a]
    }

    /// `a == b` or one is an ancestor of the other.
    pub fn comparable(&self, a: usize, b: usize) -> bool {
        a == b || self.is_ancestor(a, b) || self.is_ancestor(b, a)
    }

    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        a
    }

    pub fn preorder(&self) -> &[usize] {
        &self.pre
    }

    pub fn postorder(&self) -> &[usize] {
        &self.post
    }

    /// Nodes of the subtree rooted at `v`, including `v`.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out
    }

    /// Maximum number of children over all nodes.
    pub fn max_children(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Split tree over all vertices of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedMergeTree {
    pub parent: Vec<Option<usize>>,
    pub values: Vec<f64>,
    pub root: usize,
}

impl AugmentedMergeTree {
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.parent.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(v);
            }
        }
        ch
    }

    /// Edges as `(child, parent)` pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
            .collect();
        e.sort_unstable();
        e
    }
}

struct UnionFind {
    parent: Vec<usize>,
    lowest: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            lowest: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }
}

/// Descending sweep with union-find: when vertex `x` is reached, the lowest
/// vertex of every superlevel component adjacent to `x` becomes a child of `x`.
pub fn build_augmented(field: &ScalarField) -> AugmentedMergeTree {
    let n = field.len();
    let values = field.values();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut processed = vec![false; n];
    let mut uf = UnionFind::new(n);
    let mut parent = vec![None; n];
    for &x in &order {
        let mut comps: Vec<usize> = field
            .domain()
            .neighbors(x)
            .iter()
            .filter(|&&u| processed[u])
            .map(|&u| uf.find(u))
            .collect();
        comps.sort_unstable();
        comps.dedup();
        for c in comps {
            parent[uf.lowest[c]] = Some(x);
            uf.parent[c] = x;
        }
        uf.lowest[x] = x;
        processed[x] = true;
    }
    AugmentedMergeTree {
        parent,
        values: values.to_vec(),
        root: order.last().copied().unwrap_or(0),
    }
}

/// Merge tree with regular vertices pruned. Node indices are sorted by
/// ascending value (ties by vertex id), so the root is node 0 and every
/// parent index is smaller than its children's.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractMergeTree {
    tree: RootedTree,
    vertex: Vec<usize>,
    value: Vec<f64>,
}

impl AbstractMergeTree {
    /// Builds a tree from `(vertex, value)` nodes and `(child, parent)` edges
    /// given by vertex id, then checks the abstract merge tree invariants.
    pub fn from_edges(nodes: &[(usize, f64)], edges: &[(usize, usize)]) -> Result<Self> {
        let mut idx: Vec<usize> = (0..nodes.len()).collect();
        idx.sort_by(|&a, &b| {
            nodes[a]
                .1
                .total_cmp(&nodes[b].1)
                .then(nodes[a].0.cmp(&nodes[b].0))
        });
        let vertex: Vec<usize> = idx.iter().map(|&i| nodes[i].0).collect();
        let value: Vec<f64> = idx.iter().map(|&i| nodes[i].1).collect();
        let pos = |v: usize| vertex.iter().position(|&w| w == v);
        let mut parent = vec![None; vertex.len()];
        for &(c, p) in edges {
            let (ci, pi) = match (pos(c), pos(p)) {
                (Some(ci), Some(pi)) => (ci, pi),
                _ => {
                    return Err(Error::InvariantViolation(format!(
                        "edge ({c}, {p}) uses an unknown vertex"
                    )))
                }
            };
            if parent[ci].is_some() {
                return Err(Error::InvariantViolation(format!("vertex {c} has two parents")));
            }
            parent[ci] = Some(pi);
        }
        let t = Self {
            tree: RootedTree::from_parents(parent)?,
            vertex,
            value,
        };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        let t = &self.tree;
        for v in 0..t.len() {
            if let Some(p) = t.parent(v) {
                if self.value[p] > self.value[v] {
                    return Err(Error::InvariantViolation(format!(
                        "vertex {} lies below its parent",
                        self.vertex[v]
                    )));
                }
                if t.children(v).len() == 1 {
                    return Err(Error::InvariantViolation(format!(
                        "vertex {} is regular",
                        self.vertex[v]
                    )));
                }
            }
        }
        if t.len() > 1 && t.children(t.root()).len() != 1 {
            return Err(Error::InvariantViolation(format!(
                "root has {} children",
                t.children(t.root()).len()
            )));
        }
        Ok(())
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.tree.len() - 1
    }

    pub fn root(&self) -> usize {
        self.tree.root()
    }

    /// Field vertex of a node.
    pub fn vertex(&self, node: usize) -> usize {
        self.vertex[node]
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertex
    }

    pub fn value(&self, node: usize) -> f64 {
        self.value[node]
    }

    pub fn values(&self) -> &[f64] {
        &self.value
    }

    pub fn node_of_vertex(&self, v: usize) -> Option<usize> {
        self.vertex.iter().position(|&w| w == v)
    }

    /// Length of the edge from `node` to its parent, 0 for the root.
    pub fn edge_length(&self, node: usize) -> f64 {
        self.tree
            .parent(node)
            .map_or(0.0, |p| self.value[node] - self.value[p])
    }

    pub fn total_length(&self) -> f64 {
        (0..self.len()).map(|v| self.edge_length(v)).sum()
    }

    /// deg(T): the largest child count.
    pub fn deg(&self) -> usize {
        self.tree.max_children()
    }

    /// `(child vertex, parent vertex)` pairs, sorted.
    pub fn vertex_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = (0..self.len())
            .filter_map(|v| self.tree.parent(v).map(|p| (self.vertex[v], self.vertex[p])))
            .collect();
        e.sort_unstable();
        e
    }

    pub fn from_field(field: &ScalarField) -> Result<Self> {
        prune_to_abstract(&build_augmented(field))
    }
}

/// Removes every non-root node with exactly one child.
pub fn prune_to_abstract(aug: &AugmentedMergeTree) -> Result<AbstractMergeTree> {
    let children = aug.children();
    let keep: Vec<usize> = (0..aug.parent.len())
        .filter(|&v| v == aug.root || children[v].len() != 1)
        .collect();
    let kept = {
        let mut k = vec![false; aug.parent.len()];
        for &v in &keep {
            k[v] = true;
        }
        k
    };
    let nodes: Vec<(usize, f64)> = keep.iter().map(|&v| (v, aug.values[v])).collect();
    let mut edges = Vec::new();
    for &v in &keep {
        let mut p = aug.parent[v];
        while let Some(q) = p {
            if kept[q] {
                break;
            }
            p = aug.parent[q];
        }
        if let Some(p) = p {
            edges.push((v, p));
        }
    }
    AbstractMergeTree::from_edges(&nodes, &edges)
}
