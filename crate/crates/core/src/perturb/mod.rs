//! Minimal vertex perturbations: generation, classification and
//! decomposition of larger perturbations.

mod classify;
mod decompose;
mod scenarios;

pub use classify::{classify_change, Classification, ShapeEvidence};
pub use decompose::{decompose_perturbation, PerturbationSequence};
pub use scenarios::{scenario_suite, Scenario};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
}

/// A single vertex moved without passing more than one other vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimalPerturbation {
    pub vertex: usize,
    pub old_value: f64,
    pub new_value: f64,
    /// The vertex passed on the way, if any.
    pub swap_partner: Option<usize>,
}

impl MinimalPerturbation {
    pub fn extent(&self) -> f64 {
        (self.new_value - self.old_value).abs()
    }

    pub fn direction(&self) -> Direction {
        if self.new_value >= self.old_value {
            Direction::Up
        } else {
            Direction::Down
        }
    }

    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField> {
        f.apply_value_change(self.vertex, self.new_value)
    }

    /// Vertices whose names may be exchanged between the two trees.
    pub fn exempt(&self) -> Vec<usize> {
        let mut e = vec![self.vertex];
        e.extend(self.swap_partner);
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChangeClass {
    SimpleChange,
    EdgeSplit,
    VerticalSwap,
    OrderedHorizontalSwap,
    UnorderedHorizontalSwap,
}

impl ChangeClass {
    pub const ALL: [ChangeClass; 5] = [
        ChangeClass::SimpleChange,
        ChangeClass::EdgeSplit,
        ChangeClass::VerticalSwap,
        ChangeClass::OrderedHorizontalSwap,
        ChangeClass::UnorderedHorizontalSwap,
    ];

    pub fn short(&self) -> &'static str {
        match self {
            ChangeClass::SimpleChange => "SC",
            ChangeClass::EdgeSplit => "ES",
            ChangeClass::VerticalSwap => "VS",
            ChangeClass::OrderedHorizontalSwap => "OHS",
            ChangeClass::UnorderedHorizontalSwap => "UHS",
        }
    }

    pub fn is_horizontal(&self) -> bool {
        matches!(
            self,
            ChangeClass::OrderedHorizontalSwap | ChangeClass::UnorderedHorizontalSwap
        )
    }
}

impl fmt::Display for ChangeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ChangeClass::SimpleChange => "SimpleChange",
            ChangeClass::EdgeSplit => "EdgeSplit",
            ChangeClass::VerticalSwap => "VerticalSwap",
            ChangeClass::OrderedHorizontalSwap => "OrderedHorizontalSwap",
            ChangeClass::UnorderedHorizontalSwap => "UnorderedHorizontalSwap",
        };
        f.write_str(name)
    }
}

/// Checks that `f2` differs from `f` by a minimal perturbation. Returns
/// `None` for identical fields.
pub fn check_minimal(f: &ScalarField, f2: &ScalarField) -> Result<Option<MinimalPerturbation>> {
    if !f.same_domain(f2) {
        return Err(Error::DomainMismatch);
    }
    let (a, b) = (f.values(), f2.values());
    let changed: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
    let x = match changed.as_slice() {
        [] => return Ok(None),
        [x] => *x,
        _ => {
            return Err(Error::NotMinimal(format!(
                "{} vertices change value",
                changed.len()
            )))
        }
    };
    let passed: Vec<usize> = (0..a.len())
        .filter(|&u| u != x && (a[u] < a[x]) != (b[u] < b[x]))
        .collect();
    if passed.len() > 1 {
        return Err(Error::NotMinimal(format!(
            "vertex {x} passes {} vertices",
            passed.len()
        )));
    }
    Ok(Some(MinimalPerturbation {
        vertex: x,
        old_value: a[x],
        new_value: b[x],
        swap_partner: passed.first().copied(),
    }))
}

/// Up to four minimal moves of `vertex`: up and down without passing
/// anything (to the midpoint towards the rank neighbour), and swaps with the
/// rank successor and predecessor. A swap lands past the neighbour by half
/// the gap to the next value beyond it, or by half the original gap when
/// there is none.
pub fn enumerate_minimal_perturbations(f: &ScalarField, vertex: usize) -> Vec<MinimalPerturbation> {
    let vals = f.values();
    if vertex >= vals.len() {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = vals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let v = vals[vertex];
    let r = sorted.iter().position(|&s| s == v).unwrap();
    let at = |i: isize| -> Option<f64> {
        (i >= 0 && (i as usize) < sorted.len()).then(|| sorted[i as usize])
    };
    let ri = r as isize;
    let (lo, hi) = (at(ri - 1), at(ri + 1));
    let (lo2, hi2) = (at(ri - 2), at(ri + 2));
    let partner = |value: f64| vals.iter().position(|&w| w == value);
    let mk = |new_value: f64, swap_partner: Option<usize>| MinimalPerturbation {
        vertex,
        old_value: v,
        new_value,
        swap_partner,
    };
    let mut out = Vec::new();
    let up = match (hi, lo) {
        (Some(h), _) => (v + h) / 2.0,
        (None, Some(l)) => v + (v - l) / 2.0,
        (None, None) => v + 1.0,
    };
    out.push(mk(up, None));
    let down = match (lo, hi) {
        (Some(l), _) => (v + l) / 2.0,
        (None, Some(h)) => v - (h - v) / 2.0,
        (None, None) => v - 1.0,
    };
    out.push(mk(down, None));
    if let Some(h) = hi {
        let margin = hi2.map_or((h - v) / 2.0, |h2| (h2 - h) / 2.0);
        out.push(mk(h + margin, partner(h)));
    }
    if let Some(l) = lo {
        let margin = lo2.map_or((v - l) / 2.0, |l2| (l - l2) / 2.0);
        out.push(mk(l - margin, partner(l)));
    }
    out
}
