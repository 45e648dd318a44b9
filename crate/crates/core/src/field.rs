//! Piecewise linear scalar fields on the 1-skeleton of a domain.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertices and edges of a simplicial complex. Higher simplices are not
/// stored since superlevel set connectivity only depends on edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain1Skeleton {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Domain1Skeleton {
    /// Edges are normalised to `(min, max)` and sorted. Connectivity is not
    /// required here, see [`validate_field`].
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::SelfLoop(a, b));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::EdgeOutOfRange {
                    a,
                    b,
                    n: vertex_count,
                });
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(e.0, e.1));
            }
        }
        let edges: Vec<_> = seen.into_iter().collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Ok(Self {
            vertex_count,
            edges,
            adjacency,
        })
    }

    /// Path graph `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path edges are valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.vertex_count
    }
}

/// 1-skeleton of a triangulated `rows x cols` grid. Vertex `(r, c)` has id
/// `r * cols + c`; every cell gets the diagonal from `(r, c)` to `(r+1, c+1)`.
pub fn build_grid_domain(rows: usize, cols: usize) -> Result<Domain1Skeleton> {
    if rows < 2 || cols < 2 {
        return Err(Error::DimensionTooSmall { rows, cols });
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
            if r + 1 < rows && c + 1 < cols {
                edges.push((id(r, c), id(r + 1, c + 1)));
            }
        }
    }
    Domain1Skeleton::new(rows * cols, &edges)
}

/// Injective vertex values on a connected domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: Arc<Domain1Skeleton>,
    values: Vec<f64>,
}

/// Rank of every vertex by ascending value, starting at 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexOrder {
    pub rank: Vec<usize>,
}

impl VertexOrder {
    /// Vertex ids sorted by ascending value.
    pub fn sorted(&self) -> Vec<usize> {
        let mut out = vec![0; self.rank.len()];
        for (v, &r) in self.rank.iter().enumerate() {
            out[r - 1] = v;
        }
        out
    }
}

fn first_duplicate(values: &[f64]) -> Option<(usize, usize)> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx.windows(2)
        .find(|w| values[w[0]] == values[w[1]])
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

pub fn validate_field(domain: Domain1Skeleton, values: Vec<f64>) -> Result<ScalarField> {
    ScalarField::new(Arc::new(domain), values)
}

impl ScalarField {
    pub fn new(domain: Arc<Domain1Skeleton>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.vertex_count() {
            return Err(Error::LengthMismatch {
                expected: domain.vertex_count(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(v));
        }
        if let Some((a, b)) = first_duplicate(&values) {
            return Err(Error::DuplicateValue(a, b, values[a]));
        }
        if !domain.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(Self { domain, values })
    }

    /// Field on a path graph, mostly for tests.
    pub fn on_path(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(Arc::new(Domain1Skeleton::path(n)), values)
    }

    pub fn domain(&self) -> &Domain1Skeleton {
        &self.domain
    }

    pub fn shared_domain(&self) -> &Arc<Domain1Skeleton> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_domain(&self, other: &ScalarField) -> bool {
        Arc::ptr_eq(&self.domain, &other.domain) || *self.domain == *other.domain
    }

    /// Replaces all values at once, keeping the domain.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(Arc::clone(&self.domain), values)
    }

    pub fn vertex_order(&self) -> VertexOrder {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        let mut rank = vec![0; idx.len()];
        for (r, v) in idx.into_iter().enumerate() {
            rank[v] = r + 1;
        }
        VertexOrder { rank }
    }

    pub fn apply_value_change(&self, vertex: usize, new_value: f64) -> Result<Self> {
        if vertex >= self.values.len() {
            return Err(Error::UnknownVertex(vertex));
        }
        if !new_value.is_finite() {
            return Err(Error::NonFinite(vertex));
        }
        if let Some(u) = (0..self.values.len()).find(|&u| u != vertex && self.values[u] == new_value)
        {
            return Err(Error::DuplicateValue(u.min(vertex), u.max(vertex), new_value));
        }
        let mut values = self.values.clone();
        values[vertex] = new_value;
        Ok(Self {
            domain: Arc::clone(&self.domain),
            values,
        })
    }

    /// Connected components of the subgraph induced by `{v : f(v) > t}`,
    /// each sorted, ordered by smallest member.
    pub fn superlevel_components(&self, threshold: f64) -> Vec<Vec<usize>> {
        let n = self.values.len();
        let inside: Vec<bool> = self.values.iter().map(|&x| x > threshold).collect();
        let mut comp = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for s in 0..n {
            if !inside[s] || comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &u in self.domain.neighbors(v) {
                    if inside[u] && comp[u] == usize::MAX {
                        comp[u] = id;
                        members.push(u);
                        stack.push(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

pub fn vertex_order(field: &ScalarField) -> VertexOrder {
    field.vertex_order()
}

pub fn apply_value_change(field: &ScalarField, vertex: usize, new_value: f64) -> Result<ScalarField> {
    field.apply_value_change(vertex, new_value)
}

pub fn superlevel_components(field: &ScalarField, threshold: f64) -> Vec<Vec<usize>> {
    field.superlevel_components(threshold)
}
