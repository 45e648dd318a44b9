//! JSON formats for fields and trees.
//!
//! A field file is either an explicit graph
//! `{"values": [..], "edges": [[0, 1], ..]}` or a triangulated grid
//! `{"rows": 3, "cols": 3, "values": [..]}` with row-major values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{build_grid_domain, validate_field, Domain1Skeleton, ScalarField};
use crate::mergetree::{build_obdt, AbstractMergeTree, Bdt, OrderedBdt};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum FieldFile {
    Grid {
        rows: usize,
        cols: usize,
        values: Vec<f64>,
    },
    Graph {
        values: Vec<f64>,
        edges: Vec<(usize, usize)>,
    },
}

impl FieldFile {
    pub fn from_field(f: &ScalarField) -> Self {
        FieldFile::Graph {
            values: f.values().to_vec(),
            edges: f.domain().edges().to_vec(),
        }
    }

    pub fn into_field(self) -> Result<ScalarField> {
        match self {
            FieldFile::Grid { rows, cols, values } => validate_field(build_grid_domain(rows, cols)?, values),
            FieldFile::Graph { values, edges } => {
                validate_field(Domain1Skeleton::new(values.len(), &edges)?, values)
            }
        }
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn parse_field(text: &str) -> Result<ScalarField> {
    let file: FieldFile = serde_json::from_str(text).map_err(parse_error)?;
    file.into_field()
}

pub fn field_to_json(f: &ScalarField) -> String {
    serde_json::to_string_pretty(&FieldFile::from_field(f)).expect("field serialises")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNodeDump {
    pub vertex: usize,
    pub value: f64,
    /// Vertex id of the parent, `None` for the root.
    pub parent: Option<usize>,
    pub edge_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDump {
    pub nodes: Vec<TreeNodeDump>,
}

impl TreeDump {
    pub fn from_tree(t: &AbstractMergeTree) -> Self {
        let nodes = (0..t.len())
            .map(|n| TreeNodeDump {
                vertex: t.vertex(n),
                value: t.value(n),
                parent: t.tree().parent(n).map(|p| t.vertex(p)),
                edge_length: t.edge_length(n),
            })
            .collect();
        Self { nodes }
    }

    /// Rebuilds the tree. Edge lengths are ignored; values decide them.
    pub fn to_tree(&self) -> Result<AbstractMergeTree> {
        let nodes: Vec<(usize, f64)> = self.nodes.iter().map(|n| (n.vertex, n.value)).collect();
        let edges: Vec<(usize, usize)> = self
            .nodes
            .iter()
            .filter_map(|n| n.parent.map(|p| (n.vertex, p)))
            .collect();
        AbstractMergeTree::from_edges(&nodes, &edges)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDump {
    pub leaf: usize,
    pub start: usize,
    pub birth: f64,
    pub death: f64,
    /// Index of the parent branch in the same dump.
    pub parent: Option<usize>,
    pub attach: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdtDump {
    pub branches: Vec<BranchDump>,
}

impl BdtDump {
    pub fn from_bdt(b: &Bdt) -> Self {
        let branches = b
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| BranchDump {
                leaf: n.leaf,
                start: n.start,
                birth: n.birth,
                death: n.death,
                parent: b.tree.parent(i),
                attach: n.attach,
            })
            .collect();
        Self { branches }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObdtDump {
    pub branches: Vec<BranchDump>,
    /// For every branch, its children grouped by attachment point in
    /// ascending order. Groups are ordered, members of a group are not.
    pub child_groups: Vec<Vec<Vec<usize>>>,
}

impl ObdtDump {
    pub fn from_obdt(o: &OrderedBdt) -> Self {
        Self {
            branches: BdtDump::from_bdt(&o.bdt).branches,
            child_groups: (0..o.bdt.len()).map(|v| o.child_groups(v)).collect(),
        }
    }
}

/// Everything `build-tree` prints for one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeBundle {
    pub tree: TreeDump,
    pub bdt: BdtDump,
    pub obdt: ObdtDump,
}

impl TreeBundle {
    pub fn new(t: &AbstractMergeTree) -> Self {
        let obdt = build_obdt(t);
        Self {
            tree: TreeDump::from_tree(t),
            bdt: BdtDump::from_bdt(&obdt.bdt),
            obdt: ObdtDump::from_obdt(&obdt),
        }
    }
}

/// A pair of trees with no field behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreePairFile {
    pub t1: TreeDump,
    pub t2: TreeDump,
}
