//! Graph Slepian analysis.
//!
//! A graph operator (combinatorial or normalized Laplacian, or the
//! modularity matrix) is bandlimited to its `W` extreme eigenvectors `U_W`.
//! For a node subset `S`, the Slepian vectors are the signals in the span of
//! `U_W` with maximal energy inside `S`, obtained from the small
//! `W x W` concentration matrix `U_W^T S U_W`.
//!
//! ```
//! use gslep_core::{build_graph, compute_slepians, make_operator, solve_extreme};
//! use gslep_core::{NodeMetadata, OperatorKind, SolverConfig, SubgraphSelection};
//!
//! let edges: Vec<_> = (0..29).map(|i| (i, i + 1, 1.0)).collect();
//! let graph = build_graph(edges, 30, NodeMetadata::default()).unwrap();
//! let op = make_operator(&graph, OperatorKind::LaplacianCombinatorial).unwrap();
//! let basis = solve_extreme(&op, &SolverConfig::new(6)).unwrap();
//! let selection = SubgraphSelection::new((0..10).collect(), 30).unwrap();
//! let slepians = compute_slepians(&basis, &selection).unwrap();
//! assert!(slepians.concentrations[0] > 0.9);
//! assert_eq!(slepians.shannon_number, 2.0);
//! ```

pub mod datasets;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod operator;
pub mod partition;
pub mod query;
pub mod slepian;
pub mod spectral;

pub use datasets::{generate_swiss_roll, ingest_routes, select_by_attribute, SwissRollConfig};
pub use embedding::{embed, geographic_overlay, BasisKind, EmbeddingFrame, StyledNode};
pub use error::{Error, Result};
pub use graph::{build_graph, Edge, Graph, NodeMetadata};
pub use matrix::ColumnMatrix;
pub use operator::{make_operator, LinearOperator, OperatorKind, SpectralEnd, SymmetricOperator};
pub use partition::{cut_size, cut_size_laplacian_form, modularity_score, Partition};
pub use query::{
    compute_basis, resolve_selection, slepian_query, NodeRef, QueryResult, QuerySpec, SelectionSpec,
};
pub use slepian::{
    compute_slepians, concentration_matrix, estimate_transition, rayleigh_concentration,
    shannon_number, SlepianBasis, SubgraphSelection, Transition,
};
pub use spectral::{
    solve_dense_symmetric, solve_extreme, solve_extreme_at, SolverConfig, SpectralBasis,
};

/// Basis width used by both the CLI and the service when a request asks for
/// bandwidth `W`: at least [`DEFAULT_BASIS_WIDTH`], capped at `N - 1`.
/// Sharing one rule means the same `(graph, operator, W)` always slices the
/// same nested basis, so outputs match regardless of which front end ran.
pub fn basis_width(bandwidth: usize, node_count: usize) -> usize {
    bandwidth
        .max(DEFAULT_BASIS_WIDTH)
        .min(node_count.saturating_sub(1))
}

pub const DEFAULT_BASIS_WIDTH: usize = 100;
