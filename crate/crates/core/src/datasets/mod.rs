//! Benchmark graph generation, route ingestion and attribute selection.

pub mod openflights;
pub mod swiss_roll;

pub use openflights::{
    continent_for, ingest_routes, load_openflights, load_openflights_dir, parse_airports,
    parse_routes, AirportRecord, IngestReport, RouteRecord, SkippedRow,
};
pub use swiss_roll::{
    generate_swiss_roll, generate_swiss_roll_detailed, SwissRoll, SwissRollConfig,
};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::slepian::SubgraphSelection;

/// Key that matches node labels instead of an attribute.
pub const LABEL_KEY: &str = "label";

/// All nodes whose attribute `key` equals `value`, in ascending index order.
///
/// `key = "label"` matches node labels. An unknown key or an empty match is
/// rejected with the key and value named.
pub fn select_by_attribute(graph: &Graph, key: &str, value: &str) -> Result<SubgraphSelection> {
    let nodes: Vec<usize> = if key == LABEL_KEY {
        (0..graph.node_count())
            .filter(|&i| graph.label(i) == Some(value))
            .collect()
    } else {
        if !graph.attribute_keys().iter().any(|k| k == key) {
            return Err(Error::NoMatch {
                key: key.to_string(),
                value: format!("{value} (no node has attribute `{key}`)"),
            });
        }
        (0..graph.node_count())
            .filter(|&i| graph.attribute(i, key) == Some(value))
            .collect()
    };
    if nodes.is_empty() {
        return Err(Error::NoMatch {
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    SubgraphSelection::new(nodes, graph.node_count())
}

/// Selection from node labels; unknown labels are reported together.
pub fn select_by_labels<S: AsRef<str>>(graph: &Graph, labels: &[S]) -> Result<SubgraphSelection> {
    let mut nodes = Vec::with_capacity(labels.len());
    let mut unknown = Vec::new();
    for label in labels {
        let label = label.as_ref();
        let found: Vec<usize> = (0..graph.node_count())
            .filter(|&i| graph.label(i) == Some(label))
            .collect();
        if found.is_empty() {
            match label.parse::<usize>() {
                Ok(i) if graph.metadata().labels.is_none() && i < graph.node_count() => {
                    nodes.push(i)
                }
                _ => unknown.push(label.to_string()),
            }
        } else {
            nodes.extend(found);
        }
    }
    if !unknown.is_empty() {
        return Err(Error::UnknownNodes(unknown));
    }
    SubgraphSelection::new(nodes, graph.node_count())
}
