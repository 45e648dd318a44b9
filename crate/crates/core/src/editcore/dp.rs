use super::{CostModel, EditMapping};
use crate::assignment::hungarian;
use crate::mergetree::LabeledTree;

struct Tables<'a> {
    l1: &'a LabeledTree,
    l2: &'a LabeledTree,
    cost: CostModel,
    /// cost of deleting / inserting whole subtrees
    del: Vec<f64>,
    ins: Vec<f64>,
    memo: Vec<Vec<Option<f64>>>,
    ordered: bool,
}

fn subtree_sums(l: &LabeledTree, f: impl Fn(&crate::mergetree::Label) -> f64) -> Vec<f64> {
    let mut s: Vec<f64> = l.labels.iter().map(&f).collect();
    for &v in l.tree.postorder() {
        if let Some(p) = l.tree.parent(v) {
            s[p] += s[v];
        }
    }
    s
}

/// Chosen child pairs of one node pair.
type Pairs = Vec<(usize, usize)>;

impl<'a> Tables<'a> {
    fn new(l1: &'a LabeledTree, l2: &'a LabeledTree, cost: CostModel, ordered: bool) -> Self {
        Self {
            del: subtree_sums(l1, |l| cost.delete(l)),
            ins: subtree_sums(l2, |l| cost.insert(l)),
            memo: vec![vec![None; l2.len()]; l1.len()],
            l1,
            l2,
            cost,
            ordered,
        }
    }

    fn d(&mut self, a: usize, b: usize) -> f64 {
        if let Some(v) = self.memo[a][b] {
            return v;
        }
        let r = self.cost.relabel(&self.l1.labels[a], &self.l2.labels[b]) + self.children(a, b).0;
        self.memo[a][b] = Some(r);
        r
    }

    fn children(&mut self, a: usize, b: usize) -> (f64, Pairs) {
        let ca = self.l1.tree.children(a).to_vec();
        let cb = self.l2.tree.children(b).to_vec();
        if self.ordered {
            self.align_groups(&groups(self.l1, &ca), &groups(self.l2, &cb))
        } else {
            self.assign(&ca, &cb)
        }
    }

    /// Assignment with padding: a child left out is deleted or inserted
    /// together with its subtree.
    fn assign(&mut self, ca: &[usize], cb: &[usize]) -> (f64, Pairs) {
        let (p, q) = (ca.len(), cb.len());
        if p + q == 0 {
            return (0.0, Vec::new());
        }
        let mut m = vec![vec![0.0; p + q]; p + q];
        for i in 0..p {
            for j in 0..q {
                m[i][j] = self.d(ca[i], cb[j]);
            }
            for k in 0..p {
                m[i][q + k] = self.del[ca[i]];
            }
        }
        for k in 0..q {
            for j in 0..q {
                m[p + k][j] = self.ins[cb[j]];
            }
        }
        let (total, a) = hungarian(&m);
        let pairs = (0..p)
            .filter(|&i| a[i] < q)
            .map(|i| (ca[i], cb[a[i]]))
            .collect();
        (total, pairs)
    }

    fn align_groups(&mut self, g1: &[Vec<usize>], g2: &[Vec<usize>]) -> (f64, Pairs) {
        let (p, q) = (g1.len(), g2.len());
        let gdel: Vec<f64> = g1.iter().map(|g| g.iter().map(|&c| self.del[c]).sum()).collect();
        let gins: Vec<f64> = g2.iter().map(|g| g.iter().map(|&c| self.ins[c]).sum()).collect();
        let mut inner = vec![vec![(0.0, Vec::new()); q]; p];
        for i in 0..p {
            for j in 0..q {
                inner[i][j] = self.assign(&g1[i], &g2[j]);
            }
        }
        let mut a = vec![vec![0.0; q + 1]; p + 1];
        for i in 1..=p {
            a[i][0] = a[i - 1][0] + gdel[i - 1];
        }
        for j in 1..=q {
            a[0][j] = a[0][j - 1] + gins[j - 1];
        }
        for i in 1..=p {
            for j in 1..=q {
                a[i][j] = (a[i - 1][j] + gdel[i - 1])
                    .min(a[i][j - 1] + gins[j - 1])
                    .min(a[i - 1][j - 1] + inner[i - 1][j - 1].0);
            }
        }
        let mut pairs = Vec::new();
        let (mut i, mut j) = (p, q);
        while i > 0 && j > 0 {
            if a[i][j] == a[i - 1][j - 1] + inner[i - 1][j - 1].0 {
                pairs.extend_from_slice(&inner[i - 1][j - 1].1);
                i -= 1;
                j -= 1;
            } else if a[i][j] == a[i - 1][j] + gdel[i - 1] {
                i -= 1;
            } else {
                j -= 1;
            }
        }
        (a[p][q], pairs)
    }

    fn collect(&mut self, a: usize, b: usize, out: &mut Vec<(usize, usize)>) {
        out.push((a, b));
        let (_, pairs) = self.children(a, b);
        for (x, y) in pairs {
            self.collect(x, y, out);
        }
    }
}

/// Sibling groups in ascending order key; equal keys share a group.
fn groups(l: &LabeledTree, children: &[usize]) -> Vec<Vec<usize>> {
    let key = l.order.as_ref().expect("ordered tree");
    let mut ch = children.to_vec();
    ch.sort_by_key(|&c| (key[c], c));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for c in ch {
        match out.last_mut() {
            Some(g) if key[g[0]] == key[c] => g.push(c),
            _ => out.push(vec![c]),
        }
    }
    out
}

fn run(l1: &LabeledTree, l2: &LabeledTree, cost: CostModel, ordered: bool) -> (f64, EditMapping) {
    let mut t = Tables::new(l1, l2, cost, ordered);
    let (r1, r2) = (l1.tree.root(), l2.tree.root());
    let total = t.d(r1, r2);
    let mut pairs = Vec::new();
    t.collect(r1, r2, &mut pairs);
    (total, EditMapping::new(pairs))
}

/// Top-down distance with the two roots mapped: a node pair costs its
/// relabel plus an optimal assignment of the child subtrees.
pub fn selkow_dp(l1: &LabeledTree, l2: &LabeledTree, cost: CostModel) -> (f64, EditMapping) {
    run(l1, l2, cost, false)
}

/// As [`selkow_dp`], but sibling groups are aligned in order and only
/// matched group pairs exchange children. Falls back to the unordered
/// version unless both trees carry an order.
pub fn selkow_dp_ordered(l1: &LabeledTree, l2: &LabeledTree, cost: CostModel) -> (f64, EditMapping) {
    run(l1, l2, cost, l1.is_ordered() && l2.is_ordered())
}
