//! Extreme eigenpairs of graph operators.
//!
//! [`solve_extreme`] returns the `W` eigenpairs at the operator's natural end
//! of the spectrum (smallest for Laplacians, largest for modularity). One
//! extra pair is always computed so that a tie across the bandwidth cutoff
//! can be reported: when `lambda_W` and `lambda_{W+1}` coincide, the span of
//! `U_W` is not unique and anything derived from it depends on the basis.

mod dense;
mod lanczos;

use serde::{Deserialize, Serialize};

pub use dense::{solve_dense_symmetric, DenseEigen, DENSE_SIZE_LIMIT, SYMMETRY_TOLERANCE};

use crate::error::{Error, Result};
use crate::matrix::{norm, ColumnMatrix};
use crate::operator::{
    make_operator, DenseOperator, LinearOperator, OperatorKind, SpectralEnd, SymmetricOperator,
};
use lanczos::{thick_restart_lanczos, LanczosParams};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Relative gap below which the bandwidth cutoff is flagged as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub bandwidth: usize,
    /// Absolute residual bound `||A u - lambda u||` for every returned pair.
    pub tolerance: f64,
    /// Maximum number of thick restarts. Defaults to `50 * W`.
    pub max_iterations: Option<usize>,
    pub seed: u64,
    /// Krylov subspace size. Defaults to `max(2(W+1)+1, W+41)`, capped at `N`.
    pub subspace_dimension: Option<usize>,
}

impl SolverConfig {
    pub fn new(bandwidth: usize) -> Self {
        Self {
            bandwidth,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: None,
            seed: 0,
            subspace_dimension: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn max_restarts(&self) -> usize {
        self.max_iterations.unwrap_or(50 * self.bandwidth)
    }

    fn validate(&self, node_count: usize) -> Result<usize> {
        let w = self.bandwidth;
        if w == 0 || w >= node_count {
            return Err(Error::BandwidthOutOfRange {
                bandwidth: w,
                node_count,
            });
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        let nev = w + 1;
        let subspace = match self.subspace_dimension {
            Some(m) if m > node_count => {
                return Err(Error::InvalidConfig(format!(
                    "subspace dimension {m} exceeds N = {node_count}"
                )))
            }
            Some(m) if m < (2 * w + 1).min(node_count) => {
                return Err(Error::InvalidConfig(format!(
                    "subspace dimension {m} must be at least 2W+1 = {}",
                    2 * w + 1
                )))
            }
            Some(m) => m.max(nev.min(node_count)),
            None => (2 * nev + 1).max(nev + 40),
        };
        Ok(subspace.min(node_count))
    }
}

/// The leading `W` eigenpairs of a graph operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBasis {
    pub node_count: usize,
    /// `N x W`, orthonormal columns.
    pub vectors: ColumnMatrix,
    pub values: Vec<f64>,
    pub end: SpectralEnd,
    pub operator_kind: OperatorKind,
    pub residual_norms: Vec<f64>,
    pub tolerance: f64,
    pub seed: u64,
    /// The `(W+1)`-th eigenvalue, used for the degenerate-cutoff check.
    pub next_value: Option<f64>,
    pub restarts: usize,
    pub operator_applications: usize,
}

/// Reported when `lambda_W` and `lambda_{W+1}` are numerically tied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegenerateCutoff {
    pub bandwidth: usize,
    pub last_value: f64,
    pub next_value: f64,
}

impl std::fmt::Display for DegenerateCutoff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "eigenvalues {} and {} tie at the bandwidth cutoff W={}; the span of U_W is not \
             unique and derived results depend on the basis choice",
            self.last_value, self.next_value, self.bandwidth
        )
    }
}

impl SpectralBasis {
    pub fn bandwidth(&self) -> usize {
        self.values.len()
    }

    pub fn column(&self, k: usize) -> &[f64] {
        self.vectors.column(k)
    }

    /// The nested basis for a smaller bandwidth, obtained by slicing columns.
    pub fn truncated(&self, bandwidth: usize) -> Result<SpectralBasis> {
        if bandwidth == 0 || bandwidth > self.bandwidth() {
            return Err(Error::BandwidthOutOfRange {
                bandwidth,
                node_count: self.node_count,
            });
        }
        if bandwidth == self.bandwidth() {
            return Ok(self.clone());
        }
        Ok(SpectralBasis {
            vectors: self.vectors.leading_columns(bandwidth),
            values: self.values[..bandwidth].to_vec(),
            residual_norms: self.residual_norms[..bandwidth].to_vec(),
            next_value: Some(self.values[bandwidth]),
            ..self.clone()
        })
    }

    pub fn degenerate_cutoff(&self) -> Option<DegenerateCutoff> {
        let last = *self.values.last()?;
        let next = self.next_value?;
        ((last - next).abs() < DEGENERACY_THRESHOLD * last.abs().max(1.0)).then_some(
            DegenerateCutoff {
                bandwidth: self.bandwidth(),
                last_value: last,
                next_value: next,
            },
        )
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_norms.iter().copied().fold(0.0, f64::max)
    }
}

/// Eigenpairs at the natural end of `op`'s spectrum.
///
/// Laplacians of disconnected graphs are block diagonal with one zero
/// eigenvalue per component, which a single Krylov sequence cannot resolve.
/// Those are solved component by component and merged.
pub fn solve_extreme(op: &LinearOperator<'_>, cfg: &SolverConfig) -> Result<SpectralBasis> {
    let kind = op.kind();
    if kind.natural_end() == SpectralEnd::SmallestFirst {
        let (count, labels) = op.graph().connected_components();
        if count > 1 {
            return solve_by_component(op, count, &labels, cfg);
        }
    }
    solve_extreme_at(op, kind, kind.natural_end(), cfg)
}

fn solve_by_component(
    op: &LinearOperator<'_>,
    count: usize,
    labels: &[usize],
    cfg: &SolverConfig,
) -> Result<SpectralBasis> {
    let graph = op.graph();
    let kind = op.kind();
    let n = graph.node_count();
    cfg.validate(n)?;
    let wanted = cfg.bandwidth + 1;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (node, &c) in labels.iter().enumerate() {
        members[c].push(node);
    }

    // (value, component, local rank, local vector)
    let mut candidates: Vec<(f64, usize, usize, Vec<f64>)> = Vec::new();
    let mut restarts = 0;
    let mut applications = 0;
    for (c, nodes) in members.iter().enumerate() {
        let size = nodes.len();
        let k = wanted.min(size);
        if size == 1 {
            candidates.push((0.0, c, 0, vec![1.0]));
            continue;
        }
        let sub = graph.induced_subgraph(nodes)?;
        let sub_op = make_operator(&sub, kind)?;
        if size <= DENSE_SIZE_LIMIT || k == size {
            let dense = DenseOperator::from_operator(&sub_op);
            let m = ColumnMatrix::from_row_major(size, size, dense.as_slice());
            let (values, vectors) = dense::symmetric_eigen_ascending(&m)?;
            for (r, &value) in values.iter().enumerate().take(k) {
                candidates.push((value, c, r, vectors.column(r).to_vec()));
            }
        } else {
            let params = LanczosParams {
                count: k,
                end: SpectralEnd::SmallestFirst,
                subspace: (2 * k + 1).max(k + 40).min(size),
                tolerance: cfg.tolerance,
                max_restarts: cfg.max_restarts(),
                seed: cfg.seed,
            };
            let pairs = thick_restart_lanczos(&sub_op, &params)?;
            restarts += pairs.restarts;
            applications += pairs.applications;
            for r in 0..k {
                candidates.push((pairs.values[r], c, r, pairs.vectors.column(r).to_vec()));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    candidates.truncate(wanted);

    let w = cfg.bandwidth;
    let mut vectors = ColumnMatrix::zeros(n, w);
    let mut values = Vec::with_capacity(w);
    let mut residual_norms = Vec::with_capacity(w);
    let mut av = vec![0.0; n];
    for (col, (value, c, _, local)) in candidates.iter().take(w).enumerate() {
        let u = vectors.column_mut(col);
        for (&node, &x) in members[*c].iter().zip(local) {
            u[node] = x;
        }
        op.apply_into(u, &mut av);
        applications += 1;
        for (a, x) in av.iter_mut().zip(u.iter()) {
            *a -= value * x;
        }
        residual_norms.push(norm(&av));
        values.push(*value);
    }
    if let Some(worst) = residual_norms
        .iter()
        .copied()
        .find(|r| r.is_nan() || *r >= cfg.tolerance)
    {
        return Err(Error::NonConvergence {
            iterations: restarts,
            converged: residual_norms
                .iter()
                .filter(|r| **r < cfg.tolerance)
                .count(),
            requested: w,
            tolerance: cfg.tolerance,
            worst_residual: worst,
        });
    }
    let basis = SpectralBasis {
        node_count: n,
        vectors,
        values,
        end: SpectralEnd::SmallestFirst,
        operator_kind: kind,
        residual_norms,
        tolerance: cfg.tolerance,
        seed: cfg.seed,
        next_value: candidates.get(w).map(|c| c.0),
        restarts,
        operator_applications: applications,
    };
    if let Some(warning) = basis.degenerate_cutoff() {
        log::warn!("{warning}");
    }
    Ok(basis)
}

/// Eigenpairs of any symmetric operator at an explicit spectral end. `kind`
/// is recorded in the result as a label only.
pub fn solve_extreme_at<O>(
    op: &O,
    kind: OperatorKind,
    end: SpectralEnd,
    cfg: &SolverConfig,
) -> Result<SpectralBasis>
where
    O: SymmetricOperator + ?Sized,
{
    let n = op.dim();
    let subspace = cfg.validate(n)?;
    let w = cfg.bandwidth;
    let params = LanczosParams {
        count: w + 1,
        end,
        subspace,
        tolerance: cfg.tolerance,
        max_restarts: cfg.max_restarts(),
        seed: cfg.seed,
    };
    let pairs = thick_restart_lanczos(op, &params)?;
    let basis = SpectralBasis {
        node_count: n,
        vectors: pairs.vectors.leading_columns(w),
        values: pairs.values[..w].to_vec(),
        end,
        operator_kind: kind,
        residual_norms: pairs.residuals[..w].to_vec(),
        tolerance: cfg.tolerance,
        seed: cfg.seed,
        next_value: Some(pairs.values[w]),
        restarts: pairs.restarts,
        operator_applications: pairs.applications,
    };
    if let Some(warning) = basis.degenerate_cutoff() {
        log::warn!("{warning}");
    }
    log::debug!(
        "{kind}: {w} eigenpairs after {} restarts, {} operator applications, max residual {:e}",
        basis.restarts,
        basis.operator_applications,
        basis.max_residual()
    );
    Ok(basis)
}
