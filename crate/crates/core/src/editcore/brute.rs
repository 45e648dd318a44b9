use super::dp::selkow_dp_ordered;
use super::{guard, CostModel, EditMapping, Guards, MappingConstraint};
use crate::error::{Error, Result};
use crate::mergetree::{LabeledTree, RootedTree};
use crate::TAU;

struct Search<'a> {
    l1: &'a LabeledTree,
    l2: &'a LabeledTree,
    t1: &'a RootedTree,
    t2: &'a RootedTree,
    constraint: MappingConstraint,
    ordered: bool,
    order: Vec<usize>,
    rel: Vec<Vec<f64>>,
    del: Vec<f64>,
    ins: Vec<f64>,
    img: Vec<Option<usize>>,
    used: Vec<bool>,
    pairs: Vec<(usize, usize)>,
    best: f64,
    best_pairs: Option<Vec<(usize, usize)>>,
}

impl Search<'_> {
    fn lower_bound(&self, from: usize) -> f64 {
        let rest = &self.order[from..];
        let mut lb = 0.0;
        for &v in rest {
            let mut m = self.del[v];
            for w in 0..self.used.len() {
                if !self.used[w] {
                    m = m.min(self.rel[v][w] / 2.0);
                }
            }
            lb += m;
        }
        for w in 0..self.used.len() {
            if self.used[w] {
                continue;
            }
            let mut m = self.ins[w];
            for &v in rest {
                m = m.min(self.rel[v][w] / 2.0);
            }
            lb += m;
        }
        lb
    }

    fn allowed(&self, v: usize, w: usize) -> bool {
        if self.used[w] || !self.rel[v][w].is_finite() {
            return false;
        }
        let (t1, t2) = (self.t1, self.t2);
        if self.ordered {
            for &(u, x) in &self.pairs {
                if t1.parent(u) == t1.parent(v)
                    && t2.parent(x) == t2.parent(w)
                    && self.l1.relation(u, v) != self.l2.relation(x, w)
                {
                    return false;
                }
            }
        }
        match self.constraint {
            MappingConstraint::Selkow => match (t1.parent(v), t2.parent(w)) {
                (None, None) => true,
                (Some(p), Some(q)) => self.img[p] == Some(q),
                _ => false,
            },
            MappingConstraint::Tai | MappingConstraint::ZhangConstrained => {
                let ancestors_ok = self.pairs.iter().all(|&(u, x)| {
                    t1.is_ancestor(u, v) == t2.is_ancestor(x, w)
                        && t1.is_ancestor(v, u) == t2.is_ancestor(w, x)
                });
                ancestors_ok
                    && (self.constraint == MappingConstraint::Tai || self.lca_ok(v, w))
            }
            _ => unreachable!(),
        }
    }

    /// Every triple containing the new pair `(v, w)` keeps the lowest common
    /// ancestor condition.
    fn lca_ok(&self, v: usize, w: usize) -> bool {
        let (t1, t2) = (self.t1, self.t2);
        let inc1 = |a: usize, b: usize| !t1.comparable(a, b);
        let inc2 = |a: usize, b: usize| !t2.comparable(a, b);
        let ps = &self.pairs;
        for (i, &(v1, w1)) in ps.iter().enumerate() {
            for &(v2, w2) in &ps[i + 1..] {
                if inc1(t1.lca(v1, v2), v) != inc2(t2.lca(w1, w2), w) {
                    return false;
                }
            }
            let (a, c) = (t1.lca(v1, v), t2.lca(w1, w));
            if inc1(a, v) != inc2(c, w) {
                return false;
            }
            for &(v3, w3) in ps {
                if inc1(a, v3) != inc2(c, w3) {
                    return false;
                }
            }
        }
        true
    }

    fn go(&mut self, k: usize, partial: f64) {
        if partial + self.lower_bound(k) >= self.best - TAU {
            return;
        }
        if k == self.order.len() {
            let total = partial
                + (0..self.used.len())
                    .filter(|&w| !self.used[w])
                    .map(|w| self.ins[w])
                    .sum::<f64>();
            if total < self.best - TAU {
                self.best = total;
                self.best_pairs = Some(self.pairs.clone());
            }
            return;
        }
        let v = self.order[k];
        let parent_unmapped = self.constraint == MappingConstraint::Selkow
            && self.t1.parent(v).is_some_and(|p| self.img[p].is_none());
        if !parent_unmapped {
            for w in 0..self.used.len() {
                if !self.allowed(v, w) {
                    continue;
                }
                self.img[v] = Some(w);
                self.used[w] = true;
                self.pairs.push((v, w));
                let c = self.rel[v][w];
                self.go(k + 1, partial + c);
                self.pairs.pop();
                self.used[w] = false;
                self.img[v] = None;
            }
        }
        let root_forced = self.constraint == MappingConstraint::Selkow && self.t1.parent(v).is_none();
        if !root_forced && self.del[v].is_finite() {
            self.go(k + 1, partial + self.del[v]);
        }
    }
}

/// Exact minimum-cost mapping under `constraint` by branch and bound over
/// T1 in preorder. Among optimal mappings (within `TAU`) the first one in
/// search order wins: images are tried in ascending order before leaving
/// a node unmapped. Two ordered trees must also keep sibling relations.
pub fn brute_force_distance(
    l1: &LabeledTree,
    l2: &LabeledTree,
    constraint: MappingConstraint,
    cost: CostModel,
    guards: &Guards,
) -> Result<(f64, EditMapping)> {
    if matches!(
        constraint,
        MappingConstraint::DeformFree | MappingConstraint::DeformOneDegree
    ) {
        return Err(Error::Parameter(
            "deformation constraints use deform_brute_force".into(),
        ));
    }
    guard("first tree nodes", l1.len(), guards.brute_nodes)?;
    guard("second tree nodes", l2.len(), guards.brute_nodes)?;
    let (ub, ub_map) = selkow_dp_ordered(l1, l2, cost);
    let rel: Vec<Vec<f64>> = l1
        .labels
        .iter()
        .map(|a| l2.labels.iter().map(|b| cost.relabel(a, b)).collect())
        .collect();
    let mut s = Search {
        l1,
        l2,
        t1: &l1.tree,
        t2: &l2.tree,
        constraint,
        ordered: l1.is_ordered() && l2.is_ordered(),
        order: l1.tree.preorder().to_vec(),
        rel,
        del: l1.labels.iter().map(|l| cost.delete(l)).collect(),
        ins: l2.labels.iter().map(|l| cost.insert(l)).collect(),
        img: vec![None; l1.len()],
        used: vec![false; l2.len()],
        pairs: Vec::new(),
        best: if ub.is_finite() { ub + 2.0 * TAU } else { f64::INFINITY },
        best_pairs: None,
    };
    s.go(0, 0.0);
    Ok(match s.best_pairs {
        Some(p) => (s.best, EditMapping::new(p)),
        None => (ub, ub_map),
    })
}
