//! Text interchange: edge lists, node-metadata sidecars, basis artifacts and
//! the exported Slepian, frame and spectrum tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! written file re-reads to bit-identical values. Files written through the
//! path helpers appear atomically (temporary file, then rename).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingFrame, StyledNode};
use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, NodeMetadata};
use crate::operator::OperatorKind;
use crate::slepian::SlepianBasis;
use crate::spectral::SpectralBasis;

const NODES_DIRECTIVE: &str = "nodes";

/// Writes `path` by filling a temporary sibling file and renaming it into place.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut out = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut out)?;
        out.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

// ---------------------------------------------------------------------------
// Edge lists

/// Writes `# nodes N` followed by one `i j weight` line per edge.
pub fn write_edge_list(graph: &Graph, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "# {NODES_DIRECTIVE} {}", graph.node_count()).map_err(io_err)?;
    for e in graph.edges() {
        writeln!(out, "{} {} {}", e.source, e.target, e.weight).map_err(io_err)?;
    }
    Ok(())
}

/// Parsed edge list; `node_count` comes from a `# nodes N` line when present.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub edges: Vec<(usize, usize, f64)>,
    pub node_count: Option<usize>,
}

impl EdgeList {
    /// Declared node count, else one past the largest index.
    pub fn resolved_node_count(&self) -> usize {
        self.node_count.unwrap_or_else(|| {
            self.edges
                .iter()
                .map(|&(i, j, _)| i.max(j) + 1)
                .max()
                .unwrap_or(0)
        })
    }
}

pub fn read_edge_list(input: impl BufRead, source: &str) -> Result<EdgeList> {
    let mut list = EdgeList {
        edges: Vec::new(),
        node_count: None,
    };
    for (index, line) in input.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        let parse_err = |message: String| Error::Parse {
            path: source.to_string(),
            line: line_no,
            message,
        };
        let text = line.trim();
        if let Some(comment) = text.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next() == Some(NODES_DIRECTIVE) {
                let n = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| parse_err("malformed node count directive".into()))?;
                list.node_count = Some(n);
            }
            continue;
        }
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(format!(
                "expected `i j weight`, found {} fields",
                fields.len()
            )));
        }
        let index_field = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(format!("invalid node index `{s}`")))
        };
        let weight = fields[2]
            .parse::<f64>()
            .map_err(|_| parse_err(format!("invalid weight `{}`", fields[2])))?;
        list.edges
            .push((index_field(fields[0])?, index_field(fields[1])?, weight));
    }
    Ok(list)
}

// ---------------------------------------------------------------------------
// Node metadata sidecar

/// Writes `id,label,<position columns>,<attribute keys...>`; absent values are empty.
///
/// The `label` column is omitted for unlabeled graphs so they reload unlabeled.
/// 2-D positions are named `lon,lat`, 3-D positions `x,y,z`.
pub fn write_node_metadata(graph: &Graph, out: &mut dyn Write) -> Result<()> {
    let meta = graph.metadata();
    let dim = meta
        .positions
        .as_ref()
        .and_then(|p| p.first())
        .map_or(0, Vec::len);
    let keys = graph.attribute_keys();
    let labeled = meta.labels.is_some();
    let mut header = vec!["id".to_string()];
    if labeled {
        header.push("label".to_string());
    }
    header.extend(position_columns(dim).iter().map(|s| s.to_string()));
    header.extend(keys.iter().cloned());

    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header)?;
    for node in 0..graph.node_count() {
        let mut row = vec![node.to_string()];
        if labeled {
            row.push(graph.label(node).unwrap_or("").to_string());
        }
        if let Some(p) = graph.position(node) {
            row.extend(p.iter().map(f64::to_string));
        }
        for key in &keys {
            row.push(graph.attribute(node, key).unwrap_or("").to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

fn position_columns(dim: usize) -> &'static [&'static str] {
    match dim {
        2 => &["lon", "lat"],
        3 => &["x", "y", "z"],
        _ => &[],
    }
}

/// Reads a sidecar written by [`write_node_metadata`] for `node_count` nodes.
pub fn read_node_metadata(
    input: impl std::io::Read,
    source: &str,
    node_count: usize,
) -> Result<NodeMetadata> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let column = |name: &str| header.iter().position(|h| h == name);
    let id_col = column("id").ok_or_else(|| Error::Parse {
        path: source.to_string(),
        line: 1,
        message: "metadata header lacks an `id` column".into(),
    })?;
    let label_col = column("label");
    let pos_cols: Vec<usize> = [&["x", "y", "z"][..], &["lon", "lat"][..]]
        .iter()
        .map(|names| names.iter().filter_map(|n| column(n)).collect::<Vec<_>>())
        .find(|cols| cols.len() >= 2)
        .unwrap_or_default();
    let attr_cols: Vec<usize> = (0..header.len())
        .filter(|c| *c != id_col && Some(*c) != label_col && !pos_cols.contains(c))
        .collect();

    let mut labels = vec![String::new(); node_count];
    let mut positions = vec![Vec::new(); node_count];
    let mut attributes = vec![BTreeMap::new(); node_count];
    let mut seen = vec![false; node_count];
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let parse_err = |message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let id: usize = record[id_col]
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("invalid node id `{}`", &record[id_col])))?;
        if id >= node_count {
            return Err(parse_err(format!(
                "node id {id} out of range for {node_count} nodes"
            )));
        }
        if std::mem::replace(&mut seen[id], true) {
            return Err(parse_err(format!("duplicate node id {id}")));
        }
        if let Some(c) = label_col {
            labels[id] = record[c].to_string();
        }
        for &c in &pos_cols {
            let v = record[c]
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_err(format!("invalid coordinate `{}`", &record[c])))?;
            positions[id].push(v);
        }
        for &c in &attr_cols {
            if !record[c].is_empty() {
                attributes[id].insert(header[c].clone(), record[c].to_string());
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Parse {
            path: source.to_string(),
            line: 0,
            message: format!("no metadata row for node {missing}"),
        });
    }
    Ok(NodeMetadata {
        labels: label_col.map(|_| labels),
        positions: (!pos_cols.is_empty()).then_some(positions),
        attributes: (!attr_cols.is_empty()).then_some(attributes),
    })
}

/// Loads an edge list and, optionally, its metadata sidecar.
pub fn load_graph(edges_path: &Path, metadata_path: Option<&Path>) -> Result<Graph> {
    let list = read_edge_list(open(edges_path)?, &edges_path.display().to_string())?;
    let n = list.resolved_node_count();
    let metadata = match metadata_path {
        Some(path) => read_node_metadata(open(path)?, &path.display().to_string(), n)?,
        None => NodeMetadata::default(),
    };
    build_graph(list.edges, n, metadata)
}

/// Saves the edge list and, when the graph has metadata, the sidecar.
pub fn save_graph(graph: &Graph, edges_path: &Path, metadata_path: &Path) -> Result<()> {
    write_atomic(edges_path, |out| write_edge_list(graph, out))?;
    let meta = graph.metadata();
    if meta.labels.is_some() || meta.positions.is_some() || meta.attributes.is_some() {
        write_atomic(metadata_path, |out| write_node_metadata(graph, out))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Basis artifact

pub fn save_basis(basis: &SpectralBasis, path: &Path) -> Result<()> {
    write_atomic(path, |out| {
        serde_json::to_writer(&mut *out, basis)?;
        writeln!(out).map_err(io_err)
    })
}

pub fn load_basis(path: &Path) -> Result<SpectralBasis> {
    Ok(serde_json::from_reader(open(path)?)?)
}

// ---------------------------------------------------------------------------
// Slepian exports

/// Sidecar record accompanying an exported Slepian table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlepianSummary {
    pub operator: OperatorKind,
    pub bandwidth: usize,
    pub node_count: usize,
    pub selection_size: usize,
    pub mu_sequence: Vec<f64>,
    pub shannon_number: f64,
    pub transition_index: usize,
    pub transition_detected: bool,
}

impl SlepianSummary {
    pub fn new(operator: OperatorKind, slepians: &SlepianBasis) -> Self {
        Self {
            operator,
            bandwidth: slepians.bandwidth,
            node_count: slepians.node_count,
            selection_size: slepians.selection_size,
            mu_sequence: slepians.concentrations.clone(),
            shannon_number: slepians.shannon_number,
            transition_index: slepians.transition.index,
            transition_detected: slepians.transition.detected,
        }
    }
}

/// Writes `node,label,s1..sm` for the first `columns` Slepian vectors.
pub fn write_slepian_table(
    graph: &Graph,
    slepians: &SlepianBasis,
    columns: usize,
    out: &mut dyn Write,
) -> Result<()> {
    let m = columns.min(slepians.bandwidth);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["node".to_string(), "label".to_string()];
    header.extend((1..=m).map(|k| format!("s{k}")));
    w.write_record(&header)?;
    for node in 0..graph.node_count() {
        let mut row = vec![node.to_string(), graph.display_label(node)];
        row.extend((0..m).map(|k| slepians.column(k)[node].to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Frames and spectra

/// One node of an exported frame. Overlay fields are `None` when the graph
/// has no 2-D positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub node: usize,
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub color_scalar: f64,
    pub magnitude: f64,
    pub lon: Option<f64>,
    pub lat: Option<f64>,
    pub hue: Option<f64>,
    pub size: Option<f64>,
}

pub fn frame_records(
    graph: &Graph,
    frame: &EmbeddingFrame,
    styled: Option<&[StyledNode]>,
) -> Vec<FrameRecord> {
    (0..frame.len())
        .map(|node| {
            let [x, y] = frame.coords[node];
            let overlay = styled.map(|s| &s[node]);
            FrameRecord {
                node,
                label: graph.display_label(node),
                x,
                y,
                color_scalar: frame.color_scalar[node],
                magnitude: frame.magnitude[node],
                lon: overlay.map(|s| s.lon),
                lat: overlay.map(|s| s.lat),
                hue: overlay.map(|s| s.hue),
                size: overlay.map(|s| s.size),
            }
        })
        .collect()
}

/// Writes `node,label,x,y,color_scalar,magnitude,lon,lat,hue,size`.
pub fn write_frame_table(records: &[FrameRecord], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record([
        "node",
        "label",
        "x",
        "y",
        "color_scalar",
        "magnitude",
        "lon",
        "lat",
        "hue",
        "size",
    ])?;
    for record in records {
        w.serialize(record)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// One row of a concentration spectrum table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub bandwidth: usize,
    pub k: usize,
    pub mu: f64,
    pub shannon_number: f64,
    pub transition_index: usize,
}

/// Rows for one bandwidth; `k` is 1-based.
pub fn spectrum_rows(slepians: &SlepianBasis) -> Vec<SpectrumRow> {
    slepians
        .concentrations
        .iter()
        .enumerate()
        .map(|(k, &mu)| SpectrumRow {
            bandwidth: slepians.bandwidth,
            k: k + 1,
            mu,
            shannon_number: slepians.shannon_number,
            transition_index: slepians.transition.index,
        })
        .collect()
}

pub fn write_spectrum_table(rows: &[SpectrumRow], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(["bandwidth", "k", "mu", "shannon_number", "transition_index"])?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize + ?Sized>(value: &T, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out).map_err(io_err)
}
