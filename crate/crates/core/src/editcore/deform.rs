use std::collections::BTreeMap;

use serde::Serialize;

use super::{guard, Guards};
use crate::assignment::hungarian;
use crate::error::Result;
use crate::mergetree::AbstractMergeTree;
use crate::TAU;

/// A merge tree after contracting a set of edges and pruning the nodes left
/// with one child. Surviving nodes keep their original indices; a survivor's
/// length is the sum of the original edges between it and its new parent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractedTree {
    pub alive: Vec<bool>,
    pub parent: Vec<Option<usize>>,
    pub len: Vec<f64>,
    pub root: usize,
}

impl ContractedTree {
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.alive.len()];
        for v in 0..self.alive.len() {
            if let (true, Some(p)) = (self.alive[v], self.parent[v]) {
                ch[p].push(v);
            }
        }
        ch
    }

    pub fn survivors(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&v| self.alive[v]).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.survivors().iter().map(|&v| self.len[v]).sum()
    }

    fn code(&self, v: usize, ch: &[Vec<usize>], out: &mut Vec<String>) -> String {
        let mut parts: Vec<String> = ch[v].iter().map(|&c| self.code(c, ch, out)).collect();
        parts.sort();
        let s = format!("({})", parts.concat());
        out[v] = s.clone();
        s
    }

    /// Canonical shape string of the tree and of every surviving subtree.
    pub fn shape(&self) -> (String, Vec<String>) {
        let ch = self.children();
        let mut codes = vec![String::new(); self.alive.len()];
        let c = self.code(self.root, &ch, &mut codes);
        (c, codes)
    }
}

/// Contracts the edge above every node with `removed[v]` (the root has no
/// edge and is never removed), then prunes non-root nodes with one child.
pub fn contract(tree: &AbstractMergeTree, removed: &[bool]) -> ContractedTree {
    let t = tree.tree();
    let n = t.len();
    let root = t.root();
    let kept = |v: usize| v == root || !removed[v];
    let mut up = vec![None; n];
    for v in 0..n {
        if kept(v) && v != root {
            let mut p = t.parent(v);
            while let Some(q) = p {
                if kept(q) {
                    break;
                }
                p = t.parent(q);
            }
            up[v] = p;
        }
    }
    let mut nch = vec![0usize; n];
    for v in 0..n {
        if let (true, Some(p)) = (kept(v), up[v]) {
            nch[p] += 1;
        }
    }
    let pruned = |v: usize| v != root && nch[v] == 1;
    let alive: Vec<bool> = (0..n).map(|v| kept(v) && !pruned(v)).collect();
    let mut parent = vec![None; n];
    let mut len = vec![0.0; n];
    for v in 0..n {
        if !alive[v] || v == root {
            continue;
        }
        let mut l = tree.edge_length(v);
        let mut p = up[v].expect("non-root node has a parent");
        while !alive[p] {
            l += tree.edge_length(p);
            p = up[p].expect("pruned nodes are not the root");
        }
        parent[v] = Some(p);
        len[v] = l;
    }
    ContractedTree {
        alive,
        parent,
        len,
        root,
    }
}

/// Optimal deformation found by the search: contracted edge sets, the
/// isomorphism between the two contracted trees and the total cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeformWitness {
    pub cost: f64,
    /// Nodes of T1 whose parent edge is contracted.
    pub d1: Vec<usize>,
    pub d2: Vec<usize>,
    /// Surviving node pairs, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub c1: ContractedTree,
    pub c2: ContractedTree,
}

struct Entry {
    mask: u32,
    del: f64,
    rest: f64,
    tree: ContractedTree,
    codes: Vec<String>,
}

fn enumerate(tree: &AbstractMergeTree, one_degree: bool) -> BTreeMap<String, Vec<Entry>> {
    let t = tree.tree();
    let edges: Vec<usize> = (0..t.len()).filter(|&v| v != t.root()).collect();
    let mut out: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
    for mask in 0u32..(1u32 << edges.len()) {
        let mut removed = vec![false; t.len()];
        for (i, &v) in edges.iter().enumerate() {
            removed[v] = mask >> i & 1 == 1;
        }
        if one_degree
            && edges
                .iter()
                .any(|&v| removed[v] && t.children(v).iter().any(|&c| !removed[c]))
        {
            continue;
        }
        let del = edges
            .iter()
            .filter(|&&v| removed[v])
            .map(|&v| tree.edge_length(v))
            .sum();
        let c = contract(tree, &removed);
        let (code, codes) = c.shape();
        out.entry(code).or_default().push(Entry {
            mask,
            del,
            rest: c.total_length(),
            tree: c,
            codes,
        });
    }
    for list in out.values_mut() {
        list.sort_by(|a, b| a.del.total_cmp(&b.del).then(a.mask.cmp(&b.mask)));
    }
    out
}

/// Cheapest relabelling between two isomorphic contracted trees; children
/// are paired only with children of the same shape.
fn iso(a: &Entry, b: &Entry, x: usize, y: usize, pairs: &mut Option<&mut Vec<(usize, usize)>>) -> f64 {
    let ca = a.tree.children();
    let cb = b.tree.children();
    iso_rec(a, b, &ca, &cb, x, y, pairs)
}

fn iso_rec(
    a: &Entry,
    b: &Entry,
    ca: &[Vec<usize>],
    cb: &[Vec<usize>],
    x: usize,
    y: usize,
    pairs: &mut Option<&mut Vec<(usize, usize)>>,
) -> f64 {
    if let Some(p) = pairs.as_deref_mut() {
        p.push((x, y));
    }
    let mut total = (a.tree.len[x] - b.tree.len[y]).abs();
    let mut groups: BTreeMap<&str, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for &c in &ca[x] {
        groups.entry(a.codes[c].as_str()).or_default().0.push(c);
    }
    for &d in &cb[y] {
        groups.entry(b.codes[d].as_str()).or_default().1.push(d);
    }
    for (g1, g2) in groups.values() {
        let m: Vec<Vec<f64>> = g1
            .iter()
            .map(|&c| g2.iter().map(|&d| iso_rec(a, b, ca, cb, c, d, &mut None)).collect())
            .collect();
        let (cost, assign) = hungarian(&m);
        total += cost;
        if pairs.is_some() {
            for (i, &j) in assign.iter().enumerate() {
                iso_rec(a, b, ca, cb, g1[i], g2[j], pairs);
            }
        }
    }
    total
}

fn edge_count(t: &AbstractMergeTree) -> usize {
    t.edge_count()
}

/// Exact deformation distance by enumerating contracted edge sets of both
/// trees. With `one_degree`, contracted sets must be closed under taking
/// descendants so that they can be removed by leaf deletions.
pub fn deform_brute_force(
    t1: &AbstractMergeTree,
    t2: &AbstractMergeTree,
    one_degree: bool,
    guards: &Guards,
) -> Result<DeformWitness> {
    guard("first tree edges", edge_count(t1), guards.deform_edges)?;
    guard("second tree edges", edge_count(t2), guards.deform_edges)?;
    let e1 = enumerate(t1, one_degree);
    let e2 = enumerate(t2, one_degree);
    let mut best = f64::INFINITY;
    let mut arg: Option<(&Entry, &Entry)> = None;
    for (code, l1) in &e1 {
        let Some(l2) = e2.get(code) else { continue };
        let min2 = l2[0].del;
        for a in l1 {
            if a.del + min2 >= best - TAU {
                break;
            }
            for b in l2 {
                if a.del + b.del >= best - TAU {
                    break;
                }
                if a.del + b.del + (a.rest - b.rest).abs() >= best - TAU {
                    continue;
                }
                let c = a.del + b.del + iso(a, b, a.tree.root, b.tree.root, &mut None);
                if c < best - TAU {
                    best = c;
                    arg = Some((a, b));
                }
            }
        }
    }
    let (a, b) = arg.expect("contracting every edge always gives a common shape");
    let mut pairs = Vec::new();
    iso(a, b, a.tree.root, b.tree.root, &mut Some(&mut pairs));
    pairs.sort_unstable();
    let removed = |t: &AbstractMergeTree, mask: u32| -> Vec<usize> {
        let edges: Vec<usize> = (0..t.len()).filter(|&v| v != t.root()).collect();
        edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    };
    Ok(DeformWitness {
        cost: best,
        d1: removed(t1, a.mask),
        d2: removed(t2, b.mask),
        pairs,
        c1: a.tree.clone(),
        c2: b.tree.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{nine_node_tree, small_tree};

    #[test]
    fn identical_trees_cost_nothing() {
        let t = small_tree(2.0, 3.0);
        for od in [false, true] {
            let w = deform_brute_force(&t, &t, od, &Guards::default()).unwrap();
            assert_eq!(w.cost, 0.0);
            assert!(w.d1.is_empty() && w.d2.is_empty());
            assert_eq!(w.pairs, vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        }
    }

    #[test]
    fn contracting_an_inner_edge_merges_children() {
        // removing the edge above C (length 2) hangs E and D below B
        let t = nine_node_tree();
        let c = t.node_of_vertex(2).unwrap();
        let mut removed = vec![false; t.len()];
        removed[c] = true;
        let ct = contract(&t, &removed);
        let b = t.node_of_vertex(1).unwrap();
        let e = t.node_of_vertex(4).unwrap();
        let d = t.node_of_vertex(3).unwrap();
        assert_eq!(ct.parent[e], Some(b));
        assert_eq!(ct.parent[d], Some(b));
        assert_eq!(ct.len[e], 6.0);
        assert!((t.total_length() - ct.total_length() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn deleting_a_leaf_prunes_its_saddle() {
        let t = small_tree(2.0, 3.0);
        let mut removed = vec![false; 4];
        removed[2] = true;
        let ct = contract(&t, &removed);
        assert_eq!(ct.survivors(), vec![0, 3]);
        assert_eq!(ct.len[3], 6.0 + 3.0);
    }

    #[test]
    fn leaf_length_change() {
        let a = small_tree(2.0, 3.0);
        let b = small_tree(2.0, 3.5);
        let w = deform_brute_force(&a, &b, false, &Guards::default()).unwrap();
        assert!((w.cost - 0.5).abs() < 1e-12);
    }
}
