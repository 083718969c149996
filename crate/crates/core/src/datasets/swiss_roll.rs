//! Swiss-roll benchmark: a uniformly sampled ribbon rolled in three dimensions
//! and connected by a truncated Gaussian kernel.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, NodeMetadata};
use crate::slepian::SubgraphSelection;

/// Node count the kernel constants were tuned for.
pub const REFERENCE_NODE_COUNT: usize = 4400;

/// Height of the unrolled ribbon before scaling.
pub const ROLL_HEIGHT: f64 = 21.0;

/// Uniform scale applied to the rolled coordinates.
///
/// The raw roll spans roughly 30 x 21 x 30 units, far wider than the kernel
/// reach of 0.15. Scaling by this factor gives 4400 nodes a mean degree in the
/// tens and a radius-0.8 selection of about 760 nodes.
pub const DEFAULT_ROLL_SCALE: f64 = 0.0785;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwissRollConfig {
    pub node_count: usize,
    pub kernel_scale: f64,
    pub weight_threshold: f64,
    pub seed: u64,
    pub subgraph_radius: f64,
    pub roll_scale: f64,
}

impl Default for SwissRollConfig {
    fn default() -> Self {
        Self {
            node_count: REFERENCE_NODE_COUNT,
            kernel_scale: 0.005,
            weight_threshold: 0.01,
            seed: 0,
            subgraph_radius: 0.8,
            roll_scale: DEFAULT_ROLL_SCALE,
        }
    }
}

impl SwissRollConfig {
    /// Reference constants at a different node count, with the kernel widened
    /// by `4400 / node_count` so the expected number of neighbours per node stays
    /// comparable. Without this, small rolls fall apart into isolated nodes.
    pub fn rescaled(node_count: usize, seed: u64) -> Self {
        let base = Self::default();
        Self {
            node_count,
            kernel_scale: base.kernel_scale * REFERENCE_NODE_COUNT as f64 / node_count as f64,
            seed,
            ..base
        }
    }

    /// Distance beyond which the kernel weight drops below the threshold.
    pub fn cutoff_distance(&self) -> f64 {
        (-self.kernel_scale * self.weight_threshold.ln()).sqrt()
    }

    fn validate(&self) -> Result<()> {
        if self.node_count < 10 {
            return Err(Error::InvalidDataset(format!(
                "swiss roll needs at least 10 nodes, got {}",
                self.node_count
            )));
        }
        let positive = [
            ("kernel_scale", self.kernel_scale),
            ("weight_threshold", self.weight_threshold),
            ("subgraph_radius", self.subgraph_radius),
            ("roll_scale", self.roll_scale),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidDataset(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        if self.weight_threshold >= 1.0 {
            return Err(Error::InvalidDataset(format!(
                "weight_threshold must be < 1, got {}",
                self.weight_threshold
            )));
        }
        Ok(())
    }
}

/// Generated roll with its selection and the sampled ribbon coordinates.
#[derive(Debug, Clone)]
pub struct SwissRoll {
    pub graph: Graph,
    pub selection: SubgraphSelection,
    pub seed_node: usize,
    /// Unit-square samples `(a, b)` per node.
    pub ribbon: Vec<[f64; 2]>,
}

/// Samples the roll and returns the graph together with its subgraph selection.
pub fn generate_swiss_roll(cfg: &SwissRollConfig) -> Result<(Graph, SubgraphSelection)> {
    let roll = generate_swiss_roll_detailed(cfg)?;
    Ok((roll.graph, roll.selection))
}

pub fn generate_swiss_roll_detailed(cfg: &SwissRollConfig) -> Result<SwissRoll> {
    cfg.validate()?;
    let n = cfg.node_count;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ribbon: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
    let positions: Vec<[f64; 3]> = ribbon
        .iter()
        .map(|&[a, b]| {
            let t = 1.5 * PI * (1.0 + 2.0 * a);
            [
                cfg.roll_scale * t * t.cos(),
                cfg.roll_scale * ROLL_HEIGHT * b,
                cfg.roll_scale * t * t.sin(),
            ]
        })
        .collect();

    // A weight w >= threshold iff d^2 <= -kernel_scale * ln(threshold).
    let reach2 = -cfg.kernel_scale * cfg.weight_threshold.ln();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d2 = squared_distance(&positions[i], &positions[j]);
            if d2 > reach2 {
                continue;
            }
            let w = (-d2 / cfg.kernel_scale).exp();
            if w >= cfg.weight_threshold {
                edges.push((i, j, w));
            }
        }
    }
    if edges.is_empty() {
        log::warn!("swiss roll kernel produced no edges");
    }

    let seed_node = (0..n)
        .filter(|&i| (1.0 / 3.0..=2.0 / 3.0).contains(&ribbon[i][1]))
        .min_by(|&i, &j| positions[i][0].total_cmp(&positions[j][0]))
        .ok_or(Error::EmptySelection)?;
    let radius2 = cfg.subgraph_radius * cfg.subgraph_radius;
    let selected: Vec<usize> = (0..n)
        .filter(|&i| squared_distance(&positions[i], &positions[seed_node]) <= radius2)
        .collect();

    let metadata = NodeMetadata {
        positions: Some(positions.iter().map(|p| p.to_vec()).collect()),
        ..NodeMetadata::default()
    };
    let graph = build_graph(edges, n, metadata)?;
    let selection = SubgraphSelection::new(selected, n)?;
    Ok(SwissRoll {
        graph,
        selection,
        seed_node,
        ribbon,
    })
}

fn squared_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
