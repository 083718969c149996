use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("edge #{edge} ({source_node}, {target}): self-loops are not allowed")]
    SelfLoop {
        edge: usize,
        source_node: usize,
        target: usize,
    },

    #[error(
        "edge #{edge} ({source_node}, {target}): node index out of range for {node_count} nodes"
    )]
    NodeOutOfRange {
        edge: usize,
        source_node: usize,
        target: usize,
        node_count: usize,
    },

    #[error("edge #{edge} ({source_node}, {target}): weight {weight} must be finite and > 0")]
    InvalidWeight {
        edge: usize,
        source_node: usize,
        target: usize,
        weight: f64,
    },

    #[error("node metadata `{field}` has {found} entries, expected {expected}")]
    MetadataLength {
        field: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("node {node} has zero degree; the normalized Laplacian is undefined")]
    ZeroDegree { node: usize },

    #[error("graph has zero total weight; the modularity null model is undefined")]
    ZeroTotalWeight,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("partition entry {index} is {value}; entries must be +1 or -1")]
    InvalidPartitionEntry { index: usize, value: f64 },

    #[error("bandwidth {bandwidth} out of range: must satisfy 1 <= W < N = {node_count}")]
    BandwidthOutOfRange { bandwidth: usize, node_count: usize },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "eigensolver did not converge after {iterations} restarts: {converged}/{requested} \
         pairs below tolerance {tolerance:e}, worst residual {worst_residual:e}"
    )]
    NonConvergence {
        iterations: usize,
        converged: usize,
        requested: usize,
        tolerance: f64,
        worst_residual: f64,
    },

    #[error("matrix is not symmetric: max |M - M^T| = {max_asymmetry:e}")]
    Asymmetric { max_asymmetry: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dense eigensolver is limited to size {limit}, got {size}")]
    MatrixTooLarge { size: usize, limit: usize },

    #[error("tridiagonal QL iteration failed to converge at index {index}")]
    DenseNoConvergence { index: usize },

    #[error("selection is empty")]
    EmptySelection,

    #[error("selection node {node} out of range for {node_count} nodes")]
    SelectionOutOfRange { node: usize, node_count: usize },

    #[error("unknown node ids: {0:?}")]
    UnknownNodes(Vec<String>),

    #[error("no node has {key} = {value}")]
    NoMatch { key: String, value: String },

    #[error("coefficient vector is zero")]
    ZeroVector,

    #[error("axis {axis} out of range for {available} vectors")]
    AxisOutOfRange { axis: usize, available: usize },

    #[error("embedding axes must differ, got ({0}, {0})")]
    DuplicateAxes(usize),

    #[error("graph has no node positions")]
    MissingPositions,

    #[error("invalid dataset configuration: {0}")]
    InvalidDataset(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
