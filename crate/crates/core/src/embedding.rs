//! Two-dimensional embeddings from eigenvector or Slepian coordinates, and
//! the angle/magnitude styling used to overlay them on node positions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::ColumnMatrix;

/// Smallest marker size after normalization.
pub const MIN_SIZE: f64 = 0.1;

/// Percentile of the magnitude distribution mapped to size 1.
pub const SIZE_PERCENTILE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    RawEigenvectors,
    Slepian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingFrame {
    pub coords: Vec<[f64; 2]>,
    pub color_scalar: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub basis_kind: BasisKind,
    pub axis_indices: (usize, usize),
    /// Column used for `color_scalar`; `None` means the polar angle of `(x, y)`.
    pub color_axis: Option<usize>,
}

impl EmbeddingFrame {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Polar angle of node `i` in `(-pi, pi]`.
    pub fn angle(&self, i: usize) -> f64 {
        let [x, y] = self.coords[i];
        y.atan2(x)
    }

    /// Node indices sorted by decreasing magnitude; ties keep index order.
    pub fn ranked_by_magnitude(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.magnitude[b].total_cmp(&self.magnitude[a]));
        order
    }
}

/// Embeds nodes at `(vectors[:, a], vectors[:, b])`.
pub fn embed(
    vectors: &ColumnMatrix,
    axes: (usize, usize),
    color_axis: Option<usize>,
    basis_kind: BasisKind,
) -> Result<EmbeddingFrame> {
    let available = vectors.cols();
    let (a, b) = axes;
    for axis in [Some(a), Some(b), color_axis].into_iter().flatten() {
        if axis >= available {
            return Err(Error::AxisOutOfRange { axis, available });
        }
    }
    if a == b {
        return Err(Error::DuplicateAxes(a));
    }
    let (xs, ys) = (vectors.column(a), vectors.column(b));
    let coords: Vec<[f64; 2]> = xs.iter().zip(ys).map(|(&x, &y)| [x, y]).collect();
    let magnitude = coords.iter().map(|&[x, y]| x.hypot(y)).collect();
    let color_scalar = match color_axis {
        Some(c) => vectors.column(c).to_vec(),
        None => coords.iter().map(|&[x, y]| y.atan2(x)).collect(),
    };
    Ok(EmbeddingFrame {
        coords,
        color_scalar,
        magnitude,
        basis_kind,
        axis_indices: axes,
        color_axis,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyledNode {
    pub node: usize,
    pub lon: f64,
    pub lat: f64,
    /// Polar angle in degrees, `[0, 360)`, with angle 0 at hue 0.
    pub hue: f64,
    /// Magnitude over the frame's 95th-percentile magnitude, clipped to `[0.1, 1]`.
    pub size: f64,
}

/// Hue in degrees for a polar angle in radians.
pub fn hue_degrees(angle: f64) -> f64 {
    let h = angle.to_degrees().rem_euclid(360.0);
    // rem_euclid rounds tiny negative angles up to exactly 360.
    if h >= 360.0 {
        0.0
    } else {
        h
    }
}

/// Nearest-rank percentile of `values`; 0 for an empty slice.
pub fn percentile(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Marker sizes for a frame; the maximum replaces a zero percentile.
pub fn marker_sizes(magnitude: &[f64]) -> Vec<f64> {
    let mut reference = percentile(magnitude, SIZE_PERCENTILE);
    if reference <= 0.0 {
        reference = magnitude.iter().copied().fold(0.0, f64::max);
    }
    magnitude
        .iter()
        .map(|&m| {
            if reference > 0.0 {
                (m / reference).clamp(MIN_SIZE, 1.0)
            } else {
                MIN_SIZE
            }
        })
        .collect()
}

/// Styles every node of `frame` at its 2-D graph position.
pub fn geographic_overlay(frame: &EmbeddingFrame, graph: &Graph) -> Result<Vec<StyledNode>> {
    let positions = graph
        .metadata()
        .positions
        .as_ref()
        .ok_or(Error::MissingPositions)?;
    if positions.len() != frame.len() {
        return Err(Error::LengthMismatch {
            expected: positions.len(),
            found: frame.len(),
        });
    }
    let sizes = marker_sizes(&frame.magnitude);
    Ok(positions
        .iter()
        .enumerate()
        .map(|(node, p)| StyledNode {
            node,
            lon: p[0],
            lat: p[1],
            hue: hue_degrees(frame.angle(node)),
            size: sizes[node],
        })
        .collect())
}
