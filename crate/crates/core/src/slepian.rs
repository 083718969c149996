//! Graph Slepian vectors.
//!
//! Given a bandlimited basis `U_W` and a node subset `S`, the Slepian
//! vectors are the combinations `s = U_W v` with maximal energy inside `S`.
//! They are eigenvectors of the `W x W` concentration matrix
//! `C = U_W^T diag(1_S) U_W`, with eigenvalues `mu_k` giving the fraction of
//! energy each one keeps in `S`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, ColumnMatrix};
use crate::spectral::{solve_dense_symmetric, DegenerateCutoff, SpectralBasis};

/// Concentrations below this are reported as exactly zero.
pub const CONCENTRATION_FLOOR: f64 = 1e-10;

/// Minimum consecutive drop in `mu` that counts as a phase transition.
pub const TRANSITION_MIN_DROP: f64 = 0.05;

/// A sorted set of distinct node indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphSelection {
    nodes: Vec<usize>,
    node_count: usize,
}

impl SubgraphSelection {
    pub fn new(mut nodes: Vec<usize>, node_count: usize) -> Result<Self> {
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.is_empty() {
            return Err(Error::EmptySelection);
        }
        if let Some(&node) = nodes.iter().find(|&&u| u >= node_count) {
            return Err(Error::SelectionOutOfRange { node, node_count });
        }
        Ok(Self { nodes, node_count })
    }

    pub fn all(node_count: usize) -> Result<Self> {
        Self::new((0..node_count).collect(), node_count)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    /// Diagonal of the 0/1 selector matrix.
    pub fn indicator(&self) -> Vec<f64> {
        let mut ind = vec![0.0; self.node_count];
        for &u in &self.nodes {
            ind[u] = 1.0;
        }
        ind
    }

    fn check_against(&self, basis: &SpectralBasis) -> Result<()> {
        if let Some(&node) = self.nodes.iter().find(|&&u| u >= basis.node_count) {
            return Err(Error::SelectionOutOfRange {
                node,
                node_count: basis.node_count,
            });
        }
        Ok(())
    }
}

/// Shannon number `K = W S / N`.
pub fn shannon_number(bandwidth: usize, selection_size: usize, node_count: usize) -> f64 {
    (bandwidth * selection_size) as f64 / node_count as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    /// Number of well-concentrated vectors (1-based index of the last one).
    pub index: usize,
    /// False when no drop reached [`TRANSITION_MIN_DROP`]; `index` is then a fallback.
    pub detected: bool,
}

/// Locates the localized/delocalized boundary in a descending `mu` sequence.
///
/// Returns the 1-based `k` maximizing `mu_k - mu_{k+1}`, first `k` on exact
/// ties. If every drop is below [`TRANSITION_MIN_DROP`], falls back to
/// `round(K)` when a Shannon number is supplied and to `W` otherwise.
pub fn estimate_transition(concentrations: &[f64], shannon: Option<f64>) -> Transition {
    let w = concentrations.len();
    let fallback = |w: usize| match shannon {
        Some(k) => (k.round().max(0.0) as usize).min(w),
        None => w,
    };
    let mut best: Option<(usize, f64)> = None;
    for (k, pair) in concentrations.windows(2).enumerate() {
        let drop = pair[0] - pair[1];
        if best.is_none_or(|(_, d)| drop > d) {
            best = Some((k + 1, drop));
        }
    }
    match best {
        Some((index, drop)) if drop >= TRANSITION_MIN_DROP => Transition {
            index,
            detected: true,
        },
        _ => Transition {
            index: fallback(w),
            detected: false,
        },
    }
}

/// `C = U_W^T S U_W`, accumulated over selected rows only.
pub fn concentration_matrix(
    basis: &SpectralBasis,
    selection: &SubgraphSelection,
) -> Result<ColumnMatrix> {
    selection.check_against(basis)?;
    let w = basis.bandwidth();
    let mut c = ColumnMatrix::zeros(w, w);
    let mut row = vec![0.0; w];
    for &i in selection.nodes() {
        for (a, r) in row.iter_mut().enumerate() {
            *r = basis.vectors.get(i, a);
        }
        for b in 0..w {
            let rb = row[b];
            if rb == 0.0 {
                continue;
            }
            for (a, &ra) in row.iter().enumerate().take(w).skip(b) {
                let x = c.get(a, b) + ra * rb;
                c.set(a, b, x);
            }
        }
    }
    for b in 0..w {
        for a in b + 1..w {
            let x = c.get(a, b);
            c.set(b, a, x);
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlepianBasis {
    /// `N x W`, columns `s_k = U_W v_k`.
    pub vectors: ColumnMatrix,
    /// `mu_1 >= ... >= mu_W`, clamped to `[0, 1]`.
    pub concentrations: Vec<f64>,
    /// `W x W`, columns `v_k`.
    pub coefficients: ColumnMatrix,
    pub shannon_number: f64,
    pub transition: Transition,
    pub bandwidth: usize,
    pub selection_size: usize,
    pub node_count: usize,
    /// Carried over from the spectral basis.
    pub degenerate_cutoff: Option<DegenerateCutoff>,
}

impl SlepianBasis {
    pub fn column(&self, k: usize) -> &[f64] {
        self.vectors.column(k)
    }

    /// Count of concentrations above [`CONCENTRATION_FLOOR`].
    pub fn effective_rank(&self) -> usize {
        self.concentrations
            .iter()
            .filter(|&&m| m > CONCENTRATION_FLOOR)
            .count()
    }
}

pub fn compute_slepians(
    basis: &SpectralBasis,
    selection: &SubgraphSelection,
) -> Result<SlepianBasis> {
    let c = concentration_matrix(basis, selection)?;
    let eig = solve_dense_symmetric(&c)?;
    let concentrations = eig
        .values
        .iter()
        .map(|&mu| {
            if mu < CONCENTRATION_FLOOR {
                0.0
            } else {
                mu.min(1.0)
            }
        })
        .collect::<Vec<_>>();
    let vectors = basis.vectors.matmul(&eig.vectors);
    let w = basis.bandwidth();
    let shannon = shannon_number(w, selection.size(), basis.node_count);
    let transition = estimate_transition(&concentrations, Some(shannon));
    let degenerate_cutoff = basis.degenerate_cutoff();
    if let Some(warning) = degenerate_cutoff {
        log::warn!("slepian basis inherits a degenerate cutoff: {warning}");
    }
    Ok(SlepianBasis {
        vectors,
        concentrations,
        coefficients: eig.vectors,
        shannon_number: shannon,
        transition,
        bandwidth: w,
        selection_size: selection.size(),
        node_count: basis.node_count,
        degenerate_cutoff,
    })
}

/// Fraction of the energy of `U_W v` that lies inside the selection, `v^T C v / v^T v`.
pub fn rayleigh_concentration(
    basis: &SpectralBasis,
    selection: &SubgraphSelection,
    coefficients: &[f64],
) -> Result<f64> {
    selection.check_against(basis)?;
    if coefficients.len() != basis.bandwidth() {
        return Err(Error::LengthMismatch {
            expected: basis.bandwidth(),
            found: coefficients.len(),
        });
    }
    let vv = dot(coefficients, coefficients);
    if vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let inside: f64 = selection
        .nodes()
        .iter()
        .map(|&i| {
            let s: f64 = coefficients
                .iter()
                .enumerate()
                .map(|(a, v)| basis.vectors.get(i, a) * v)
                .sum();
            s * s
        })
        .sum();
    Ok(inside / vv)
}
