//! Bound checks for single perturbations, the instability families and the
//! randomized suites.

mod families;
mod suite;

pub use families::{
    counterexample, counterexample_fields, instability_growth, unstable_metrics, CounterexampleFamily,
    GrowthTable,
};
pub use suite::{
    random_grid_field, random_merge_tree, run_finite_stability, run_stability_suite, CellStats, FiniteReport,
    FiniteTrial, SuiteConfig, SuiteReport, TrialRecord,
};

use serde::Serialize;

use crate::distances::{distance, MetricId};
use crate::editcore::Guards;
use crate::error::Result;
use crate::field::ScalarField;
use crate::io::{FieldFile, TreeDump};
use crate::mergetree::AbstractMergeTree;
use crate::perturb::{classify_change, ChangeClass};
use crate::TAU;

/// Printed at the top of every suite report.
pub const CLAIM_NOTE: &str = "claimed cells: e on all classes; p, b on SC/ES/VS; w, x, s on SC/ES \
and w on OHS; l on SC/VS; g on SC/VS/OHS/UHS";

/// Whether a `deg * eps` bound is claimed for the metric on this class.
pub fn claimed(metric: MetricId, class: ChangeClass) -> bool {
    use ChangeClass::*;
    use MetricId::*;
    match metric {
        E => true,
        P | B => matches!(class, SimpleChange | EdgeSplit | VerticalSwap),
        W => matches!(class, SimpleChange | EdgeSplit | OrderedHorizontalSwap),
        X | S => matches!(class, SimpleChange | EdgeSplit),
        L => matches!(class, SimpleChange | VerticalSwap),
        G => class != EdgeSplit,
    }
}

/// Inputs and trees of a failed check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub f: Option<FieldFile>,
    pub f2: Option<FieldFile>,
    pub t1: TreeDump,
    pub t2: TreeDump,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub metric: MetricId,
    pub class: ChangeClass,
    pub eps: f64,
    pub deg: usize,
    pub distance: f64,
    pub bound: f64,
    /// A bound is claimed for this (metric, class) cell. Otherwise the
    /// report is informational and `pass` carries no weight.
    pub claimed: bool,
    pub pass: bool,
    pub witness: Option<Witness>,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn bound_report(
    metric: MetricId,
    class: ChangeClass,
    eps: f64,
    t1: &AbstractMergeTree,
    t2: &AbstractMergeTree,
    fields: Option<(&ScalarField, &ScalarField)>,
    guards: &Guards,
) -> Result<BoundReport> {
    let d = distance(metric, t1, t2, guards)?;
    let deg = t1.deg();
    let bound = deg as f64 * eps;
    let claimed = claimed(metric, class);
    let pass = d <= bound + TAU;
    let witness = (claimed && !pass).then(|| Witness {
        f: fields.map(|(f, _)| FieldFile::from_field(f)),
        f2: fields.map(|(_, g)| FieldFile::from_field(g)),
        t1: TreeDump::from_tree(t1),
        t2: TreeDump::from_tree(t2),
    });
    Ok(BoundReport {
        metric,
        class,
        eps,
        deg,
        distance: d,
        bound,
        claimed,
        pass,
        witness,
    })
}

/// Classifies `f -> f2` and checks `metric` against `deg(T_f) * eps`.
pub fn check_bound(f: &ScalarField, f2: &ScalarField, metric: MetricId) -> Result<BoundReport> {
    check_bound_with(f, f2, metric, &Guards::default())
}

pub fn check_bound_with(
    f: &ScalarField,
    f2: &ScalarField,
    metric: MetricId,
    guards: &Guards,
) -> Result<BoundReport> {
    let c = classify_change(f, f2)?;
    let eps = c.perturbation.map_or(0.0, |p| p.extent());
    let t1 = AbstractMergeTree::from_field(f)?;
    let t2 = AbstractMergeTree::from_field(f2)?;
    bound_report(metric, c.class, eps, &t1, &t2, Some((f, f2)), guards)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claimed_matrix_counts() {
        let n = |m| ChangeClass::ALL.iter().filter(|&&c| claimed(m, c)).count();
        assert_eq!(n(MetricId::E), 5);
        assert_eq!(n(MetricId::W), 3);
        assert_eq!(n(MetricId::X), 2);
        assert_eq!(n(MetricId::G), 4);
    }

    #[test]
    fn identical_fields_pass() {
        let f = ScalarField::on_path(vec![0.0, 3.0, 1.0, 2.0]).unwrap();
        for m in MetricId::ALL {
            let r = check_bound(&f, &f, m).unwrap();
            assert!(r.pass && r.distance == 0.0 && r.bound == 0.0, "{m}");
        }
    }
}
