//! Two-way partitions and their classical quality scores.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::operator::{make_operator, OperatorKind, SymmetricOperator};

/// Cluster labels `g_i` in `{+1, -1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition(Vec<i8>);

impl Partition {
    pub fn new(assignment: Vec<i8>) -> Result<Self> {
        if let Some(index) = assignment.iter().position(|&g| g != 1 && g != -1) {
            return Err(Error::InvalidPartitionEntry {
                index,
                value: assignment[index] as f64,
            });
        }
        Ok(Self(assignment))
    }

    /// Thresholds a real vector at zero (`>= 0` maps to `+1`), e.g. a Fiedler vector.
    pub fn from_signs(values: &[f64]) -> Self {
        Self(
            values
                .iter()
                .map(|&v| if v >= 0.0 { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[i8] {
        &self.0
    }

    fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&g| g as f64).collect()
    }

    fn check_len(&self, graph: &Graph) -> Result<()> {
        if self.len() != graph.node_count() {
            return Err(Error::LengthMismatch {
                expected: graph.node_count(),
                found: self.len(),
            });
        }
        Ok(())
    }
}

/// Total weight of edges crossing the partition, each undirected edge once.
///
/// This equals `1/4 sum_ij A_ij (1 - g_i g_j)` over ordered pairs.
pub fn cut_size(graph: &Graph, partition: &Partition) -> Result<f64> {
    partition.check_len(graph)?;
    let g = partition.labels();
    Ok(graph
        .edges()
        .iter()
        .filter(|e| g[e.source] != g[e.target])
        .map(|e| e.weight)
        .sum())
}

/// Cut size through the combinatorial Laplacian, `1/4 g^T L g`.
pub fn cut_size_laplacian_form(graph: &Graph, partition: &Partition) -> Result<f64> {
    partition.check_len(graph)?;
    let op = make_operator(graph, OperatorKind::LaplacianCombinatorial)?;
    let g = partition.as_f64();
    let lg = op.apply(&g);
    Ok(0.25 * g.iter().zip(&lg).map(|(a, b)| a * b).sum::<f64>())
}

/// Modularity `Q = g^T B g` with the Girvan–Newman null model, evaluated implicitly.
pub fn modularity_score(graph: &Graph, partition: &Partition) -> Result<f64> {
    partition.check_len(graph)?;
    let op = make_operator(graph, OperatorKind::Modularity)?;
    let g = partition.as_f64();
    let bg = op.apply(&g);
    Ok(g.iter().zip(&bg).map(|(a, b)| a * b).sum())
}
