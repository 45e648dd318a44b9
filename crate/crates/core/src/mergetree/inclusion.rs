use std::collections::{BTreeSet, HashMap};

use super::bdt::{relation_of, Bdt};
use super::{AbstractMergeTree, RootedTree};
use crate::error::{Error, Result};
use crate::TAU;

/// Default node limit for inclusion tests.
pub const INCLUSION_LIMIT: usize = 64;

/// Vertices that may be renamed during an inclusion test: the perturbed
/// vertex and the vertex it passes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Renaming {
    pub exempt: BTreeSet<usize>,
}

impl Renaming {
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            exempt: vertices.into_iter().collect(),
        }
    }

    pub fn none() -> Self {
        Self::default()
    }

    /// Same vertex, equal values, or two exempt vertices where each one is
    /// absent from the other tree.
    fn compatible(
        &self,
        (v, fv): (usize, f64),
        (w, fw): (usize, f64),
        in_a: &BTreeSet<usize>,
        in_b: &BTreeSet<usize>,
    ) -> bool {
        if v == w {
            return true;
        }
        if self.exempt.contains(&v) && self.exempt.contains(&w) {
            return !in_b.contains(&v) && !in_a.contains(&w);
        }
        (fv - fw).abs() <= TAU
    }
}

type Compat<'a> = &'a dyn Fn(usize, usize) -> bool;
type SameRelation<'a> = &'a dyn Fn((usize, usize), (usize, usize)) -> bool;

/// Whether `a` embeds into `b`: an injective map sending root to root,
/// children to children, with `compat` holding on every mapped pair. With
/// `same_relation`, every pair of mapped siblings `(a1, a2) -> (b1, b2)` must
/// also satisfy `same_relation((a1, a2), (b1, b2))`.
pub fn tree_included_up_to_iso(
    a: &RootedTree,
    b: &RootedTree,
    compat: Compat<'_>,
    same_relation: Option<SameRelation<'_>>,
    limit: usize,
) -> Result<bool> {
    for (t, what) in [(a, "first tree"), (b, "second tree")] {
        if t.len() > limit {
            return Err(Error::Guard {
                what,
                count: t.len(),
                limit,
            });
        }
    }
    let mut ctx = Embed {
        a,
        b,
        compat,
        same_relation,
        memo: HashMap::new(),
    };
    Ok(ctx.embeds(a.root(), b.root()))
}

struct Embed<'a> {
    a: &'a RootedTree,
    b: &'a RootedTree,
    compat: Compat<'a>,
    same_relation: Option<SameRelation<'a>>,
    memo: HashMap<(usize, usize), bool>,
}

impl Embed<'_> {
    fn embeds(&mut self, va: usize, vb: usize) -> bool {
        if let Some(&r) = self.memo.get(&(va, vb)) {
            return r;
        }
        let r = self.compute(va, vb);
        self.memo.insert((va, vb), r);
        r
    }

    fn compute(&mut self, va: usize, vb: usize) -> bool {
        if !(self.compat)(va, vb) {
            return false;
        }
        let ca = self.a.children(va).to_vec();
        let cb = self.b.children(vb).to_vec();
        if ca.len() > cb.len() {
            return false;
        }
        let feasible: Vec<Vec<bool>> = ca
            .iter()
            .map(|&x| cb.iter().map(|&y| self.embeds(x, y)).collect())
            .collect();
        match self.same_relation {
            None => perfect_left_matching(&feasible),
            Some(rel) => {
                let mut used = vec![false; cb.len()];
                let mut chosen = Vec::with_capacity(ca.len());
                assign_ordered(&ca, &cb, &feasible, rel, &mut used, &mut chosen)
            }
        }
    }
}

/// Kuhn's augmenting paths: can every row be matched to a distinct column?
fn perfect_left_matching(feasible: &[Vec<bool>]) -> bool {
    let cols = feasible.first().map_or(0, Vec::len);
    let mut owner: Vec<Option<usize>> = vec![None; cols];
    fn augment(
        r: usize,
        feasible: &[Vec<bool>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for c in 0..seen.len() {
            if feasible[r][c] && !seen[c] {
                seen[c] = true;
                if owner[c].is_none_or(|o| augment(o, feasible, seen, owner)) {
                    owner[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    (0..feasible.len()).all(|r| {
        let mut seen = vec![false; cols];
        augment(r, feasible, &mut seen, &mut owner)
    })
}

fn assign_ordered(
    ca: &[usize],
    cb: &[usize],
    feasible: &[Vec<bool>],
    rel: SameRelation<'_>,
    used: &mut [bool],
    chosen: &mut Vec<usize>,
) -> bool {
    let i = chosen.len();
    if i == ca.len() {
        return true;
    }
    for j in 0..cb.len() {
        if used[j] || !feasible[i][j] {
            continue;
        }
        let consistent = chosen
            .iter()
            .enumerate()
            .all(|(k, &jk)| rel((ca[k], ca[i]), (cb[jk], cb[j])));
        if !consistent {
            continue;
        }
        used[j] = true;
        chosen.push(j);
        if assign_ordered(ca, cb, feasible, rel, used, chosen) {
            return true;
        }
        chosen.pop();
        used[j] = false;
    }
    false
}

/// Inclusion of merge trees with values compared up to renaming.
pub fn merge_tree_included(
    a: &AbstractMergeTree,
    b: &AbstractMergeTree,
    renaming: &Renaming,
    limit: usize,
) -> Result<bool> {
    let in_a: BTreeSet<usize> = a.vertices().iter().copied().collect();
    let in_b: BTreeSet<usize> = b.vertices().iter().copied().collect();
    // tree nodes of the exempt pair may trade places, e.g. a saddle that
    // drops below the root minimum
    let compat = |x: usize, y: usize| {
        let (v, w) = (a.vertex(x), b.vertex(y));
        if renaming.exempt.contains(&v) && renaming.exempt.contains(&w) {
            return true;
        }
        renaming.compatible(
            (v, a.value(x)),
            (w, b.value(y)),
            &in_a,
            &in_b,
        )
    };
    tree_included_up_to_iso(a.tree(), b.tree(), &compat, None, limit)
}

fn bdt_vertices(t: &Bdt) -> BTreeSet<usize> {
    t.nodes.iter().flat_map(|n| [n.leaf, n.start]).collect()
}

/// Inclusion of branch decomposition trees. Branches are compared by their
/// leaf (strictly) and their start node; start nodes that are both exempt
/// are always compatible. With `ordered`, sibling relations must agree.
pub fn bdt_included(
    a: &Bdt,
    b: &Bdt,
    ordered: bool,
    renaming: &Renaming,
    limit: usize,
) -> Result<bool> {
    let in_a = bdt_vertices(a);
    let in_b = bdt_vertices(b);
    let compat = |x: usize, y: usize| {
        let (na, nb) = (&a.nodes[x], &b.nodes[y]);
        let leaf = renaming.compatible((na.leaf, na.death), (nb.leaf, nb.death), &in_a, &in_b);
        let both_exempt =
            renaming.exempt.contains(&na.start) && renaming.exempt.contains(&nb.start);
        let start = both_exempt
            || renaming.compatible((na.start, na.birth), (nb.start, nb.birth), &in_a, &in_b);
        leaf && start
    };
    let rel = |(a1, a2): (usize, usize), (b1, b2): (usize, usize)| {
        relation_of(&a.nodes[a1], &a.nodes[a2]) == relation_of(&b.nodes[b1], &b.nodes[b2])
    };
    let rel_ref: Option<SameRelation<'_>> = if ordered { Some(&rel) } else { None };
    tree_included_up_to_iso(&a.tree, &b.tree, &compat, rel_ref, limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::nine_node_tree;
    use crate::mergetree::build_bdt;

    #[test]
    fn reflexive() {
        let t = nine_node_tree();
        assert!(merge_tree_included(&t, &t, &Renaming::none(), INCLUSION_LIMIT).unwrap());
        let b = build_bdt(&t);
        assert!(bdt_included(&b, &b, true, &Renaming::none(), INCLUSION_LIMIT).unwrap());
    }

    #[test]
    fn values_must_match() {
        let t = nine_node_tree();
        let two = AbstractMergeTree::from_edges(&[(0, 0.0), (4, 9.5)], &[(4, 0)]).unwrap();
        assert!(!merge_tree_included(&two, &t, &Renaming::none(), INCLUSION_LIMIT).unwrap());
        let two = AbstractMergeTree::from_edges(&[(0, 0.0), (1, 2.0), (4, 10.0), (5, 5.0)], &[(1, 0), (4, 1), (5, 1)])
            .unwrap();
        // B keeps E and F below it only after renaming C away, so this fails
        assert!(!merge_tree_included(&two, &t, &Renaming::none(), INCLUSION_LIMIT).unwrap());
    }

    #[test]
    fn renaming_requires_absence() {
        let a = AbstractMergeTree::from_edges(&[(0, 0.0), (1, 5.0)], &[(1, 0)]).unwrap();
        let b = AbstractMergeTree::from_edges(&[(0, 0.0), (2, 5.5)], &[(2, 0)]).unwrap();
        assert!(!merge_tree_included(&a, &b, &Renaming::none(), INCLUSION_LIMIT).unwrap());
        assert!(merge_tree_included(&a, &b, &Renaming::new([1, 2]), INCLUSION_LIMIT).unwrap());
        assert!(!merge_tree_included(&a, &b, &Renaming::new([1]), INCLUSION_LIMIT).unwrap());
    }

    #[test]
    fn guard() {
        let t = nine_node_tree();
        assert!(merge_tree_included(&t, &t, &Renaming::none(), 4)
            .unwrap_err()
            .is_guard());
    }

    #[test]
    fn matching_needs_augmenting_paths() {
        assert!(perfect_left_matching(&[vec![true, true], vec![true, false]]));
        assert!(!perfect_left_matching(&[vec![true, false], vec![true, false]]));
    }
}
