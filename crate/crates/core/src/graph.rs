//! Immutable undirected weighted graphs.
//!
//! Edges are stored once as `(i, j, w)` with `i < j` and expanded into a
//! symmetric CSR adjacency for operator products. Degrees and the total
//! weight `2m = sum_ij A_ij` are cached at construction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Optional per-node metadata. Every present field must have one entry per node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeMetadata {
    pub labels: Option<Vec<String>>,
    /// 2-D (`lon, lat`) or 3-D coordinates.
    pub positions: Option<Vec<Vec<f64>>>,
    pub attributes: Option<Vec<BTreeMap<String, String>>>,
}

impl NodeMetadata {
    fn validate(&self, node_count: usize) -> Result<()> {
        let check = |field, found| {
            if found == node_count {
                Ok(())
            } else {
                Err(Error::MetadataLength {
                    field,
                    expected: node_count,
                    found,
                })
            }
        };
        if let Some(labels) = &self.labels {
            check("labels", labels.len())?;
        }
        if let Some(positions) = &self.positions {
            check("positions", positions.len())?;
            if let Some(first) = positions.first() {
                let dim = first.len();
                if !(2..=3).contains(&dim) || positions.iter().any(|p| p.len() != dim) {
                    return Err(Error::InvalidDataset(
                        "node positions must all be 2-D or all be 3-D".into(),
                    ));
                }
            }
        }
        if let Some(attributes) = &self.attributes {
            check("attributes", attributes.len())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    total_weight: f64,
    metadata: NodeMetadata,
}

/// Builds a validated graph from an edge list.
///
/// Edge orientation is irrelevant and repeated pairs are merged by summing
/// their weights. Self-loops, out-of-range indices and non-positive weights
/// are rejected with the position of the offending edge in the input.
pub fn build_graph<I>(edges: I, node_count: usize, metadata: NodeMetadata) -> Result<Graph>
where
    I: IntoIterator<Item = (usize, usize, f64)>,
{
    if node_count == 0 {
        return Err(Error::EmptyGraph);
    }
    metadata.validate(node_count)?;

    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (edge, (i, j, w)) in edges.into_iter().enumerate() {
        if i >= node_count || j >= node_count {
            return Err(Error::NodeOutOfRange {
                edge,
                source_node: i,
                target: j,
                node_count,
            });
        }
        if i == j {
            return Err(Error::SelfLoop {
                edge,
                source_node: i,
                target: j,
            });
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidWeight {
                edge,
                source_node: i,
                target: j,
                weight: w,
            });
        }
        *merged.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
    }

    let edges: Vec<Edge> = merged
        .into_iter()
        .map(|((source, target), weight)| Edge {
            source,
            target,
            weight,
        })
        .collect();

    let mut counts = vec![0usize; node_count];
    for e in &edges {
        counts[e.source] += 1;
        counts[e.target] += 1;
    }
    let mut offsets = Vec::with_capacity(node_count + 1);
    offsets.push(0);
    for c in &counts {
        offsets.push(offsets.last().unwrap() + c);
    }
    let nnz = offsets[node_count];
    let mut neighbors = vec![0usize; nnz];
    let mut weights = vec![0.0; nnz];
    let mut cursor = offsets[..node_count].to_vec();
    for e in &edges {
        for (row, col) in [(e.source, e.target), (e.target, e.source)] {
            neighbors[cursor[row]] = col;
            weights[cursor[row]] = e.weight;
            cursor[row] += 1;
        }
    }
    for row in 0..node_count {
        let range = offsets[row]..offsets[row + 1];
        let mut pairs: Vec<(usize, f64)> = neighbors[range.clone()]
            .iter()
            .copied()
            .zip(weights[range.clone()].iter().copied())
            .collect();
        pairs.sort_by_key(|p| p.0);
        for (k, (col, w)) in range.zip(pairs) {
            neighbors[k] = col;
            weights[k] = w;
        }
    }

    let degrees: Vec<f64> = (0..node_count)
        .map(|i| weights[offsets[i]..offsets[i + 1]].iter().sum())
        .collect();
    let total_weight = degrees.iter().sum();

    Ok(Graph {
        node_count,
        edges,
        offsets,
        neighbors,
        weights,
        degrees,
        total_weight,
        metadata,
    })
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of distinct undirected node pairs carrying weight.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Unique undirected edges sorted by `(source, target)` with `source < target`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Stored entries of the symmetric adjacency matrix (`2 * edge_count`).
    pub fn adjacency_nonzeros(&self) -> usize {
        self.neighbors.len()
    }

    pub fn degree(&self, node: usize) -> f64 {
        self.degrees[node]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// `2m`, the sum of all adjacency entries.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Neighbors of `node` in ascending order with their edge weights.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[node]..self.offsets[node + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// `y = A x` for the symmetric adjacency.
    pub fn adjacency_apply(&self, x: &[f64], y: &mut [f64]) {
        for (row, out) in y.iter_mut().enumerate() {
            let range = self.offsets[row]..self.offsets[row + 1];
            *out = self.neighbors[range.clone()]
                .iter()
                .zip(&self.weights[range])
                .map(|(&col, &w)| w * x[col])
                .sum();
        }
    }

    pub fn metadata(&self) -> &NodeMetadata {
        &self.metadata
    }

    pub fn label(&self, node: usize) -> Option<&str> {
        self.metadata
            .labels
            .as_ref()
            .map(|labels| labels[node].as_str())
    }

    pub fn position(&self, node: usize) -> Option<&[f64]> {
        self.metadata
            .positions
            .as_ref()
            .map(|positions| positions[node].as_slice())
    }

    pub fn attribute(&self, node: usize, key: &str) -> Option<&str> {
        self.metadata
            .attributes
            .as_ref()
            .and_then(|attrs| attrs[node].get(key))
            .map(String::as_str)
    }

    /// Sorted union of attribute keys across all nodes.
    pub fn attribute_keys(&self) -> Vec<String> {
        let mut keys: Vec<String> = self
            .metadata
            .attributes
            .iter()
            .flatten()
            .flat_map(|m| m.keys().cloned())
            .collect();
        keys.sort();
        keys.dedup();
        keys
    }

    /// First node carrying `label`.
    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.metadata
            .labels
            .as_ref()?
            .iter()
            .position(|l| l == label)
    }

    /// Display name used in exported tables: the label if present, else the index.
    pub fn display_label(&self, node: usize) -> String {
        match self.label(node) {
            Some(l) => l.to_string(),
            None => node.to_string(),
        }
    }

    pub fn has_isolated_nodes(&self) -> bool {
        self.degrees.contains(&0.0)
    }

    /// Connected-component label per node, numbered by lowest member index.
    pub fn connected_components(&self) -> (usize, Vec<usize>) {
        let mut label = vec![usize::MAX; self.node_count];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.node_count {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    /// Induced subgraph on `nodes` (ascending), without metadata.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        let mut local = vec![usize::MAX; self.node_count];
        for (k, &u) in nodes.iter().enumerate() {
            local[u] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.source] != usize::MAX && local[e.target] != usize::MAX)
            .map(|e| (local[e.source], local[e.target], e.weight));
        build_graph(edges, nodes.len(), NodeMetadata::default())
    }
}
