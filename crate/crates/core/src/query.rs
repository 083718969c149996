//! The interactive Slepian query shared by the command line and the service:
//! resolve a selection, slice a cached basis, compute Slepians, build a frame.
//!
//! Both front ends compute the basis at [`crate::basis_width`] and call
//! [`slepian_query`], so identical inputs give identical outputs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::datasets::{select_by_attribute, select_by_labels};
use crate::embedding::{embed, geographic_overlay, BasisKind};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::{frame_records, FrameRecord};
use crate::operator::{make_operator, OperatorKind};
use crate::slepian::{compute_slepians, SubgraphSelection};
use crate::spectral::{solve_extreme, SolverConfig, SpectralBasis};

/// A node named by index or by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeRef {
    Index(usize),
    Label(String),
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Index(i) => write!(f, "{i}"),
            NodeRef::Label(l) => f.write_str(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionSpec {
    All,
    Nodes(Vec<NodeRef>),
    Attribute { key: String, value: String },
}

impl SelectionSpec {
    /// Parses `key=value`.
    pub fn parse_attribute(text: &str) -> Result<Self> {
        let (key, value) = text.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("attribute selection `{text}` is not key=value"))
        })?;
        Ok(SelectionSpec::Attribute {
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        })
    }

    /// Parses a comma-separated list of labels; labels are matched before indices.
    pub fn parse_nodes(text: &str) -> Self {
        SelectionSpec::Nodes(
            text.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| NodeRef::Label(s.to_string()))
                .collect(),
        )
    }
}

pub fn resolve_selection(graph: &Graph, spec: &SelectionSpec) -> Result<SubgraphSelection> {
    match spec {
        SelectionSpec::All => SubgraphSelection::all(graph.node_count()),
        SelectionSpec::Attribute { key, value } => select_by_attribute(graph, key, value),
        SelectionSpec::Nodes(refs) => {
            let mut nodes = Vec::with_capacity(refs.len());
            let mut unknown = Vec::new();
            for r in refs {
                match r {
                    NodeRef::Index(i) if *i < graph.node_count() => nodes.push(*i),
                    NodeRef::Index(i) => unknown.push(i.to_string()),
                    NodeRef::Label(l) => match select_by_labels(graph, &[l]) {
                        Ok(sel) => nodes.extend_from_slice(sel.nodes()),
                        Err(_) => match l.parse::<usize>() {
                            Ok(i) if i < graph.node_count() => nodes.push(i),
                            _ => unknown.push(l.clone()),
                        },
                    },
                }
            }
            if !unknown.is_empty() {
                return Err(Error::UnknownNodes(unknown));
            }
            if nodes.is_empty() {
                return Err(Error::EmptySelection);
            }
            SubgraphSelection::new(nodes, graph.node_count())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub selection: SelectionSpec,
    pub bandwidth: usize,
    pub operator: OperatorKind,
    pub axes: (usize, usize),
    pub color_axis: Option<usize>,
}

/// Frame part of a query answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameOutput {
    pub basis_kind: BasisKind,
    pub axes: (usize, usize),
    pub color_axis: Option<usize>,
    pub nodes: Vec<FrameRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub frame: FrameOutput,
    pub mu_sequence: Vec<f64>,
    #[serde(rename = "K")]
    pub shannon_number: f64,
    pub transition_index: usize,
    pub transition_detected: bool,
    pub selection_size: usize,
    pub bandwidth: usize,
    pub operator: OperatorKind,
}

pub fn check_bandwidth(bandwidth: usize, node_count: usize) -> Result<()> {
    if bandwidth == 0 || bandwidth >= node_count {
        return Err(Error::BandwidthOutOfRange {
            bandwidth,
            node_count,
        });
    }
    Ok(())
}

/// Solves for the shared-width basis that serves bandwidth `bandwidth`.
pub fn compute_basis(
    graph: &Graph,
    operator: OperatorKind,
    bandwidth: usize,
    seed: u64,
    tolerance: f64,
) -> Result<SpectralBasis> {
    check_bandwidth(bandwidth, graph.node_count())?;
    let width = crate::basis_width(bandwidth, graph.node_count());
    let op = make_operator(graph, operator)?;
    solve_extreme(
        &op,
        &SolverConfig::new(width)
            .with_seed(seed)
            .with_tolerance(tolerance),
    )
}

/// Answers `spec` from `basis`, which must hold at least `spec.bandwidth` columns.
pub fn slepian_query(
    graph: &Graph,
    basis: &SpectralBasis,
    spec: &QuerySpec,
) -> Result<QueryResult> {
    check_bandwidth(spec.bandwidth, graph.node_count())?;
    if basis.operator_kind != spec.operator {
        return Err(Error::InvalidConfig(format!(
            "basis is for {}, query asks for {}",
            basis.operator_kind, spec.operator
        )));
    }
    let selection = resolve_selection(graph, &spec.selection)?;
    let sliced = basis.truncated(spec.bandwidth)?;
    let slepians = compute_slepians(&sliced, &selection)?;
    let frame = embed(
        &slepians.vectors,
        spec.axes,
        spec.color_axis,
        BasisKind::Slepian,
    )?;
    let planar = graph.position(0).is_some_and(|p| p.len() == 2);
    let styled = if planar {
        Some(geographic_overlay(&frame, graph)?)
    } else {
        None
    };
    Ok(QueryResult {
        frame: FrameOutput {
            basis_kind: BasisKind::Slepian,
            axes: spec.axes,
            color_axis: spec.color_axis,
            nodes: frame_records(graph, &frame, styled.as_deref()),
        },
        mu_sequence: slepians.concentrations,
        shannon_number: slepians.shannon_number,
        transition_index: slepians.transition.index,
        transition_detected: slepians.transition.detected,
        selection_size: selection.size(),
        bandwidth: spec.bandwidth,
        operator: spec.operator,
    })
}
