//! Matrix-free graph operators.
//!
//! None of the operators materialize an `N x N` matrix. The modularity
//! operator uses the Girvan–Newman null model `P = d d^T / 2m`, so
//! `B x = A x - d (d^T x) / 2m`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A real symmetric linear map on `R^dim`.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// Writes `op * x` into `y`. Both slices have length `dim()`.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorKind {
    #[serde(rename = "laplacian")]
    LaplacianCombinatorial,
    #[serde(rename = "laplacian-norm")]
    LaplacianNormalized,
    #[serde(rename = "modularity")]
    Modularity,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 3] = [
        OperatorKind::LaplacianCombinatorial,
        OperatorKind::LaplacianNormalized,
        OperatorKind::Modularity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorKind::LaplacianCombinatorial => "laplacian",
            OperatorKind::LaplacianNormalized => "laplacian-norm",
            OperatorKind::Modularity => "modularity",
        }
    }

    /// Laplacians are bandlimited from the low end, modularity from the high end.
    pub fn natural_end(self) -> SpectralEnd {
        match self {
            OperatorKind::LaplacianCombinatorial | OperatorKind::LaplacianNormalized => {
                SpectralEnd::SmallestFirst
            }
            OperatorKind::Modularity => SpectralEnd::LargestFirst,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "laplacian" => Ok(OperatorKind::LaplacianCombinatorial),
            "laplacian-norm" => Ok(OperatorKind::LaplacianNormalized),
            "modularity" => Ok(OperatorKind::Modularity),
            other => Err(format!(
                "unknown operator `{other}` (expected laplacian, laplacian-norm or modularity)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectralEnd {
    SmallestFirst,
    LargestFirst,
}

/// A graph operator bound to a borrowed graph.
#[derive(Debug, Clone)]
pub struct LinearOperator<'g> {
    graph: &'g Graph,
    kind: OperatorKind,
    inv_sqrt_degree: Option<Vec<f64>>,
    total_weight: f64,
}

pub fn make_operator(graph: &Graph, kind: OperatorKind) -> Result<LinearOperator<'_>> {
    if graph.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let inv_sqrt_degree = match kind {
        OperatorKind::LaplacianNormalized => {
            if let Some(node) = graph.degrees().iter().position(|&d| d <= 0.0) {
                return Err(Error::ZeroDegree { node });
            }
            Some(graph.degrees().iter().map(|d| 1.0 / d.sqrt()).collect())
        }
        _ => None,
    };
    if kind == OperatorKind::Modularity && graph.total_weight() <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    Ok(LinearOperator {
        graph,
        kind,
        inv_sqrt_degree,
        total_weight: graph.total_weight(),
    })
}

impl<'g> LinearOperator<'g> {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }
}

impl SymmetricOperator for LinearOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.node_count()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let g = self.graph;
        let d = g.degrees();
        match self.kind {
            OperatorKind::LaplacianCombinatorial => {
                g.adjacency_apply(x, y);
                for i in 0..y.len() {
                    y[i] = d[i] * x[i] - y[i];
                }
            }
            OperatorKind::LaplacianNormalized => {
                let s = self.inv_sqrt_degree.as_ref().expect("normalized operator");
                let scaled: Vec<f64> = x.iter().zip(s).map(|(xi, si)| xi * si).collect();
                g.adjacency_apply(&scaled, y);
                for i in 0..y.len() {
                    // D^{-1/2} (D - A) D^{-1/2} x = x - D^{-1/2} A D^{-1/2} x
                    y[i] = x[i] - s[i] * y[i];
                }
            }
            OperatorKind::Modularity => {
                g.adjacency_apply(x, y);
                let dx: f64 = d.iter().zip(x).map(|(di, xi)| di * xi).sum();
                let c = dx / self.total_weight;
                for i in 0..y.len() {
                    y[i] -= d[i] * c;
                }
            }
        }
    }
}

/// A dense row-major symmetric matrix wrapped as an operator. Mostly useful in tests.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    n: usize,
    data: Vec<f64>,
}

impl DenseOperator {
    pub fn new(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "dense operator needs n*n entries");
        Self { n, data }
    }

    pub fn from_operator(op: &dyn SymmetricOperator) -> Self {
        let n = op.dim();
        let mut data = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            op.apply_into(&e, &mut col);
            e[j] = 0.0;
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
        Self { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

impl SymmetricOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *out = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}
