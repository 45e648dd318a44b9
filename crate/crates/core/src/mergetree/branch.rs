use super::AbstractMergeTree;

/// Monotone path `nodes[0] .. nodes[k-1]` ending in a leaf. `nodes[0]` is the
/// node the branch starts from (a saddle, or the root for the main branch).
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub nodes: Vec<usize>,
    pub birth: f64,
    pub death: f64,
}

impl Branch {
    pub fn start(&self) -> usize {
        self.nodes[0]
    }

    pub fn leaf(&self) -> usize {
        *self.nodes.last().unwrap()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Branches partitioning the edges of a tree, together with their nesting.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchDecomposition {
    /// Index 0 is the main branch; the others appear in creation order.
    pub branches: Vec<Branch>,
    /// Parent branch of every branch, `None` for the main branch.
    pub parent: Vec<Option<usize>>,
    /// Position of `branches[i].start()` inside its parent branch.
    pub attach: Vec<usize>,
    /// Branch containing each node at a position > 0; the root maps to the
    /// main branch.
    pub node_branch: Vec<usize>,
}

impl BranchDecomposition {
    pub fn main(&self) -> &Branch {
        &self.branches[0]
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }
}

/// Builds the decomposition in which node `v` continues into child
/// `next[v]` (ignored for leaves).
pub fn decomposition_with_choices(tree: &AbstractMergeTree, next: &[usize]) -> BranchDecomposition {
    let t = tree.tree();
    let n = t.len();
    let mut branches = Vec::new();
    let mut parent = Vec::new();
    let mut attach = Vec::new();
    let mut node_branch = vec![0; n];
    let follow = |start: usize, first: usize| {
        let mut nodes = vec![start, first];
        let mut v = first;
        while !t.is_leaf(v) {
            v = next[v];
            nodes.push(v);
        }
        nodes
    };
    let root = t.root();
    let main_nodes = if t.is_leaf(root) {
        vec![root]
    } else {
        follow(root, next[root])
    };
    let mut queue = vec![(main_nodes, None, 0)];
    let mut qi = 0;
    while qi < queue.len() {
        let (nodes, par, pos) = queue[qi].clone();
        qi += 1;
        let id = branches.len();
        for &v in &nodes[1..] {
            node_branch[v] = id;
        }
        // the start node of a child branch belongs to its parent branch
        let from = usize::from(par.is_some());
        for (i, &v) in nodes.iter().enumerate().skip(from) {
            for &c in t.children(v) {
                if i + 1 < nodes.len() && nodes[i + 1] == c {
                    continue;
                }
                queue.push((follow(v, c), Some(id), i));
            }
        }
        branches.push(Branch {
            birth: tree.value(nodes[0]),
            death: tree.value(*nodes.last().unwrap()),
            nodes,
        });
        parent.push(par);
        attach.push(pos);
    }
    node_branch[root] = 0;
    BranchDecomposition {
        branches,
        parent,
        attach,
        node_branch,
    }
}

/// Elder rule: at every saddle the child whose subtree holds the highest
/// maximum continues. Equal maxima go to the lower vertex id.
pub fn persistence_branch_decomposition(tree: &AbstractMergeTree) -> BranchDecomposition {
    let t = tree.tree();
    let n = t.len();
    let mut best: Vec<(f64, usize)> = (0..n).map(|v| (tree.value(v), tree.vertex(v))).collect();
    for &v in t.postorder() {
        for &c in t.children(v) {
            if higher(best[c], best[v]) {
                best[v] = best[c];
            }
        }
    }
    let mut next = vec![0; n];
    for v in 0..n {
        if let Some(&first) = t.children(v).first() {
            next[v] = t.children(v).iter().copied().fold(first, |acc, c| {
                if higher(best[c], best[acc]) {
                    c
                } else {
                    acc
                }
            });
        }
    }
    decomposition_with_choices(tree, &next)
}

fn higher(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Every branch decomposition of `tree`, one per combination of
/// continuation choices at nodes with several children.
pub fn all_branch_decompositions(tree: &AbstractMergeTree) -> Vec<BranchDecomposition> {
    let t = tree.tree();
    let n = t.len();
    let branching: Vec<usize> = (0..n).filter(|&v| !t.is_leaf(v)).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; branching.len()];
    loop {
        let mut next = vec![0; n];
        for (k, &v) in branching.iter().enumerate() {
            next[v] = t.children(v)[choice[k]];
        }
        out.push(decomposition_with_choices(tree, &next));
        let mut k = 0;
        loop {
            if k == branching.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < t.children(branching[k]).len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::nine_node_tree;

    fn names(t: &AbstractMergeTree, bd: &BranchDecomposition) -> Vec<String> {
        let letter = |v: usize| (b'A' + t.vertex(v) as u8) as char;
        let mut out: Vec<String> = bd
            .branches
            .iter()
            .map(|b| format!("{}-{}", letter(b.leaf()), letter(b.start())))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn elder_rule_on_nine_node_tree() {
        let t = nine_node_tree();
        let bd = persistence_branch_decomposition(&t);
        assert_eq!(names(&t, &bd), vec!["E-A", "F-B", "G-D", "H-D", "I-C"]);
        assert_eq!(bd.main().death, 10.0);
        assert_eq!(bd.main().birth, 0.0);
    }

    #[test]
    fn two_node_tree_has_one_branch() {
        let t = AbstractMergeTree::from_edges(&[(0, 0.0), (1, 3.0)], &[(1, 0)]).unwrap();
        let bd = persistence_branch_decomposition(&t);
        assert_eq!(bd.len(), 1);
        assert_eq!(bd.main().nodes.len(), 2);
    }

    #[test]
    fn path_field_decomposition() {
        let f = crate::field::ScalarField::on_path(vec![0.0, 3.0, 1.0, 2.0]).unwrap();
        let t = AbstractMergeTree::from_field(&f).unwrap();
        let bd = persistence_branch_decomposition(&t);
        let pairs: Vec<(usize, usize, f64, f64)> = bd
            .branches
            .iter()
            .map(|b| (t.vertex(b.leaf()), t.vertex(b.start()), b.birth, b.death))
            .collect();
        assert_eq!(pairs, vec![(1, 0, 0.0, 3.0), (3, 2, 1.0, 2.0)]);
    }

    #[test]
    fn every_decomposition_partitions_edges() {
        let t = nine_node_tree();
        let all = all_branch_decompositions(&t);
        // root 1, B 2, C 2, D 3 choices
        assert_eq!(all.len(), 12);
        for bd in all {
            let mut count = vec![0; t.len()];
            for b in &bd.branches {
                for &v in &b.nodes[1..] {
                    count[v] += 1;
                }
            }
            assert_eq!(count[t.root()], 0);
            assert!((0..t.len()).filter(|&v| v != t.root()).all(|v| count[v] == 1));
        }
    }
}
