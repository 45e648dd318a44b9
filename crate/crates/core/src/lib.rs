//! Merge trees of piecewise linear scalar fields, eight merge tree edit
//! distances computed exactly on small inputs, and tools for checking how
//! those distances react to minimal vertex perturbations.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`] holds scalar fields on the 1-skeleton of a domain.
//! * [`mergetree`] builds split trees, branch decompositions and label schemes.
//! * [`editcore`] contains the mapping constraints, the exhaustive oracle,
//!   the deformation search and edit sequences.
//! * [`distances`] exposes the eight distances.
//! * [`perturb`] generates, classifies and decomposes perturbations.
//! * [`stability`] runs bound checks, counterexample families and suites.

#![allow(clippy::needless_range_loop)]

pub mod assignment;
pub mod distances;
pub mod editcore;
pub mod error;
pub mod field;
pub mod io;
pub mod mergetree;
pub mod perturb;
pub mod stability;

#[cfg(test)]
pub(crate) mod fixtures;

pub use distances::{compute, MetricId};
pub use editcore::{CostModel, EditMapping, Guards, MappingConstraint};
pub use error::{Error, Result};
pub use field::{build_grid_domain, validate_field, Domain1Skeleton, ScalarField, VertexOrder};
pub use mergetree::{
    build_augmented, prune_to_abstract, AbstractMergeTree, AugmentedMergeTree, Bdt, Label,
    LabelScheme, LabeledTree, OrderedBdt, RootedTree,
};
pub use perturb::{ChangeClass, MinimalPerturbation, PerturbationSequence};

/// Absolute tolerance used for every value and distance comparison.
pub const TAU: f64 = 1e-9;
