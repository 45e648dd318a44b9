use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distances::{distance, MetricId};
use crate::editcore::Guards;
use crate::error::{Error, Result};
use crate::field::{validate_field, Domain1Skeleton, ScalarField};
use crate::mergetree::AbstractMergeTree;

/// Tree pairs that differ by one minimal perturbation of extent about `eps`
/// but are far apart in some metrics once `x` grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CounterexampleFamily {
    /// A leaf edge of length `eps` splits off an edge of length `2x`.
    EdgeSplit,
    /// Two saddles trade places and the nesting of their branches flips.
    Horizontal,
    /// The main branch switches between two maxima `eps` apart.
    Vertical,
}

impl CounterexampleFamily {
    pub const ALL: [CounterexampleFamily; 3] = [
        CounterexampleFamily::EdgeSplit,
        CounterexampleFamily::Horizontal,
        CounterexampleFamily::Vertical,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CounterexampleFamily::EdgeSplit => "edge-split",
            CounterexampleFamily::Horizontal => "horizontal",
            CounterexampleFamily::Vertical => "vertical",
        }
    }
}

impl fmt::Display for CounterexampleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CounterexampleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown family '{s}', expected edge-split|horizontal|vertical")))
    }
}

/// Metrics whose distance grows with `x` on the family.
pub fn unstable_metrics(family: CounterexampleFamily) -> Vec<MetricId> {
    match family {
        CounterexampleFamily::EdgeSplit => vec![MetricId::L, MetricId::G],
        CounterexampleFamily::Horizontal => vec![MetricId::P, MetricId::L, MetricId::W],
        CounterexampleFamily::Vertical => vec![MetricId::W, MetricId::X, MetricId::S],
    }
}

fn check_params(x: f64, eps: f64) -> Result<()> {
    if !(eps > 0.0 && x > 2.0 * eps && x.is_finite()) {
        return Err(Error::Parameter(format!("need x > 2 eps > 0, got x = {x}, eps = {eps}")));
    }
    Ok(())
}

type TreeSpec = (Vec<(usize, f64)>, Vec<(usize, usize)>);

/// The two trees of a family. Vertex ids are `a, b, c, ... = 0, 1, 2, ...`.
pub fn counterexample(
    family: CounterexampleFamily,
    x: f64,
    eps: f64,
) -> Result<(AbstractMergeTree, AbstractMergeTree)> {
    check_params(x, eps)?;
    let ((n1, e1), (n2, e2)): (TreeSpec, TreeSpec) = match family {
        // A B C D E F
        CounterexampleFamily::EdgeSplit => (
            (
                vec![(0, 0.0), (1, x), (2, 3.0 * x), (3, 3.0 * x), (4, 2.0 * x), (5, 2.0 * x + eps)],
                vec![(1, 0), (2, 1), (4, 1), (3, 4), (5, 4)],
            ),
            (
                vec![(0, 0.0), (1, x), (2, 3.0 * x), (3, 3.0 * x)],
                vec![(1, 0), (2, 1), (3, 1)],
            ),
        ),
        // a b c d e f
        CounterexampleFamily::Horizontal => {
            let v = |b: f64| vec![(0, 0.0), (1, b), (2, 4.0 * x), (3, 3.0 * x), (4, x), (5, 2.0 * x)];
            (
                (v(x - eps), vec![(1, 0), (2, 1), (4, 1), (3, 4), (5, 4)]),
                (v(x + eps), vec![(4, 0), (3, 4), (1, 4), (2, 1), (5, 1)]),
            )
        }
        CounterexampleFamily::Vertical => {
            let v = |d: f64| vec![(0, 0.0), (1, x), (2, 2.0 * x), (3, d), (4, 4.0 * x), (5, 3.0 * x)];
            let e = vec![(1, 0), (3, 1), (2, 1), (4, 2), (5, 2)];
            ((v(4.0 * x + eps), e.clone()), (v(4.0 * x - eps), e))
        }
    };
    Ok((
        AbstractMergeTree::from_edges(&n1, &e1)?,
        AbstractMergeTree::from_edges(&n2, &e2)?,
    ))
}

/// Fields on small graphs whose merge trees are the family's trees and
/// which differ by one minimal perturbation. For the edge split the first
/// field is the one without the short leaf, and the vertex `D` sits slightly
/// above `3x` to keep values distinct.
pub fn counterexample_fields(
    family: CounterexampleFamily,
    x: f64,
    eps: f64,
) -> Result<(ScalarField, ScalarField)> {
    check_params(x, eps)?;
    let (edges, values, vertex, to): (Vec<(usize, usize)>, Vec<f64>, usize, f64) = match family {
        CounterexampleFamily::EdgeSplit => (
            vec![(2, 1), (1, 5), (5, 4), (4, 3), (0, 1)],
            vec![0.0, x, 3.0 * x, 3.0 * x + eps / 10.0, 2.0 * x, 2.0 * x - eps],
            5,
            2.0 * x + eps,
        ),
        CounterexampleFamily::Horizontal => (
            vec![(0, 1), (1, 2), (1, 4), (4, 3), (4, 5), (1, 5)],
            vec![0.0, x - eps, 4.0 * x, 3.0 * x, x, 2.0 * x],
            1,
            x + eps,
        ),
        CounterexampleFamily::Vertical => (
            vec![(0, 1), (1, 3), (1, 2), (2, 4), (2, 5)],
            vec![0.0, x, 2.0 * x, 4.0 * x + eps, 4.0 * x, 3.0 * x],
            3,
            4.0 * x - eps,
        ),
    };
    let f = validate_field(Domain1Skeleton::new(values.len(), &edges)?, values)?;
    let f2 = f.apply_value_change(vertex, to)?;
    Ok((f, f2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthTable {
    pub family: CounterexampleFamily,
    pub metric: MetricId,
    pub eps: f64,
    /// `(x, distance)` rows in input order.
    pub rows: Vec<(f64, f64)>,
}

impl GrowthTable {
    /// Distance ratio over x ratio for consecutive rows.
    pub fn relative_growth(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| (w[1].1 / w[0].1) / (w[1].0 / w[0].0))
            .collect()
    }

    /// Every consecutive pair grows like `x` within `tol` (relative).
    pub fn is_linear(&self, tol: f64) -> bool {
        let g = self.relative_growth();
        !g.is_empty() && g.iter().all(|r| (r - 1.0).abs() <= tol)
    }

    /// The distance does not change with `x`.
    pub fn is_constant(&self, tol: f64) -> bool {
        self.rows.windows(2).all(|w| (w[1].1 - w[0].1).abs() <= tol)
    }
}

pub fn instability_growth(
    family: CounterexampleFamily,
    metric: MetricId,
    x_values: &[f64],
    eps: f64,
) -> Result<GrowthTable> {
    let guards = Guards::default();
    let rows = x_values
        .iter()
        .map(|&x| {
            let (t1, t2) = counterexample(family, x, eps)?;
            Ok((x, distance(metric, &t1, &t2, &guards)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthTable {
        family,
        metric,
        eps,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::TreeDump;
    use crate::perturb::{classify_change, ChangeClass};

    #[test]
    fn figure_values() {
        let (t1, _) = counterexample(CounterexampleFamily::Horizontal, 10.0, 0.1).unwrap();
        let mut v = t1.values().to_vec();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, vec![0.0, 9.9, 10.0, 20.0, 30.0, 40.0]);

        let (t1, _) = counterexample(CounterexampleFamily::Vertical, 10.0, 0.1).unwrap();
        let mut leaves: Vec<f64> = (0..t1.len()).filter(|&n| t1.tree().is_leaf(n)).map(|n| t1.value(n)).collect();
        leaves.sort_by(f64::total_cmp);
        assert_eq!(leaves, vec![30.0, 40.0, 40.1]);

        let (t1, _) = counterexample(CounterexampleFamily::EdgeSplit, 10.0, 0.1).unwrap();
        let mut len: Vec<f64> = (0..t1.len()).filter(|&n| n != t1.root()).map(|n| t1.edge_length(n)).collect();
        len.sort_by(f64::total_cmp);
        let want = [0.1, 10.0, 10.0, 10.0, 20.0];
        assert!(len.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-9), "{len:?}");
    }

    #[test]
    fn bad_parameters() {
        assert!(counterexample(CounterexampleFamily::Vertical, 0.1, 0.1).is_err());
        assert!(counterexample(CounterexampleFamily::Vertical, 1.0, 0.0).is_err());
    }

    #[test]
    fn fields_realise_the_trees() {
        let (x, eps) = (10.0, 0.1);
        for (fam, class) in [
            (CounterexampleFamily::EdgeSplit, ChangeClass::EdgeSplit),
            (CounterexampleFamily::Horizontal, ChangeClass::UnorderedHorizontalSwap),
            (CounterexampleFamily::Vertical, ChangeClass::VerticalSwap),
        ] {
            let (f, f2) = counterexample_fields(fam, x, eps).unwrap();
            assert_eq!(classify_change(&f, &f2).unwrap().class, class, "{fam}");
            let (t1, t2) = counterexample(fam, x, eps).unwrap();
            let a = AbstractMergeTree::from_field(&f).unwrap();
            let b = AbstractMergeTree::from_field(&f2).unwrap();
            let edges = |t: &AbstractMergeTree| TreeDump::from_tree(t).nodes.iter().map(|n| (n.vertex, n.parent)).collect::<Vec<_>>();
            // the edge split fields run the family backwards
            let (a, b) = if fam == CounterexampleFamily::EdgeSplit { (b, a) } else { (a, b) };
            assert_eq!(edges(&a), edges(&t1), "{fam}");
            assert_eq!(edges(&b), edges(&t2), "{fam}");
        }
    }

    #[test]
    fn parse_family() {
        for c in CounterexampleFamily::ALL {
            assert_eq!(c.name().parse::<CounterexampleFamily>().unwrap(), c);
        }
        assert!("sideways".parse::<CounterexampleFamily>().is_err());
    }
}
