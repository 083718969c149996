use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gslep_core::datasets::{generate_swiss_roll_detailed, load_openflights, load_openflights_dir};
use gslep_core::io::{
    frame_records, load_graph, save_basis, save_graph, spectrum_rows, write_atomic,
    write_frame_table, write_json, write_slepian_table, write_spectrum_table, SlepianSummary,
    SpectrumRow,
};
use gslep_core::query::{check_bandwidth, resolve_selection, NodeRef};
use gslep_core::{
    compute_basis, compute_slepians, embed, geographic_overlay, slepian_query, BasisKind, Graph,
    QuerySpec, SelectionSpec, SlepianBasis, SpectralBasis, SwissRollConfig,
};
use serde::Serialize;

use crate::args::*;

const INCOMPLETE_MARKER: &str = "INCOMPLETE";

/// Tracks artifacts of one run so a failure can flag what was left behind.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let marker = dir.join(INCOMPLETE_MARKER);
        if marker.exists() {
            fs::remove_file(&marker).with_context(|| format!("removing {}", marker.display()))?;
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write<F>(&mut self, name: &str, fill: F) -> Result<()>
    where
        F: FnOnce(&mut dyn std::io::Write) -> gslep_core::Result<()>,
    {
        let path = self.dir.join(name);
        write_atomic(&path, fill).with_context(|| format!("writing {}", path.display()))?;
        log::info!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |out| write_json(value, out))
    }

    /// Records the failure next to any artifacts already written.
    pub fn flag_partial(&self, error: &anyhow::Error) {
        if self.written.is_empty() {
            return;
        }
        let mut text = format!("run failed: {error:#}\npartial outputs:\n");
        for path in &self.written {
            text.push_str(&format!("{}\n", path.display()));
        }
        eprintln!("{}", text.trim_end());
        let _ = fs::write(self.dir.join(INCOMPLETE_MARKER), text);
    }
}

/// Runs `body` against a fresh output directory, flagging partial results on failure.
fn with_outputs(dir: &Path, body: impl FnOnce(&mut Outputs) -> Result<()>) -> Result<()> {
    let mut outputs = Outputs::create(dir)?;
    let result = body(&mut outputs);
    if let Err(e) = &result {
        outputs.flag_partial(e);
    }
    result
}

struct Input {
    graph: Graph,
    /// Selection implied by the source (the Swiss-roll subgraph).
    default_selection: Option<SelectionSpec>,
}

fn roll_config(roll: &RollArgs, seed: u64) -> SwissRollConfig {
    let mut cfg = SwissRollConfig::rescaled(roll.node_count, seed);
    if let Some(t) = roll.threshold {
        cfg.weight_threshold = t;
    }
    if let Some(r) = roll.radius {
        cfg.subgraph_radius = r;
    }
    if let Some(k) = roll.kernel_scale {
        cfg.kernel_scale = k;
    }
    cfg
}

fn load_input(input: &InputArgs, seed: u64) -> Result<Input> {
    if let Some(edges) = &input.edges {
        let graph = load_graph(edges, input.meta.as_deref())
            .with_context(|| format!("loading graph {}", edges.display()))?;
        return Ok(Input {
            graph,
            default_selection: None,
        });
    }
    if let Some(dir) = &input.openflights {
        let (graph, report) = load_openflights_dir(dir)
            .with_context(|| format!("loading OpenFlights data from {}", dir.display()))?;
        log::info!(
            "{} airports, {} undirected edges",
            report.airports_kept,
            report.undirected_edges
        );
        return Ok(Input {
            graph,
            default_selection: None,
        });
    }
    if input.swiss_roll {
        let roll = generate_swiss_roll_detailed(&roll_config(&input.roll, seed))?;
        let nodes = roll
            .selection
            .nodes()
            .iter()
            .map(|&i| NodeRef::Index(i))
            .collect();
        return Ok(Input {
            graph: roll.graph,
            default_selection: Some(SelectionSpec::Nodes(nodes)),
        });
    }
    bail!("no input given: use one of --edges, --openflights or --swiss-roll")
}

fn read_selection_file(path: &Path) -> Result<SelectionSpec> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut nodes = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        let item = line.trim();
        if !item.is_empty() && !item.starts_with('#') {
            nodes.push(NodeRef::Label(item.to_string()));
        }
    }
    Ok(SelectionSpec::Nodes(nodes))
}

fn selection_spec(select: &SelectArgs, input: &Input) -> Result<SelectionSpec> {
    Ok(if let Some(attr) = &select.select_attr {
        SelectionSpec::parse_attribute(attr)?
    } else if let Some(nodes) = &select.select_nodes {
        SelectionSpec::parse_nodes(nodes)
    } else if let Some(path) = &select.select_file {
        read_selection_file(path)?
    } else {
        input
            .default_selection
            .clone()
            .unwrap_or(SelectionSpec::All)
    })
}

fn report(bandwidth: usize, s: &SlepianBasis) {
    println!(
        "W={bandwidth} S={} N={} K={:.4} transition_index={}{}",
        s.selection_size,
        s.node_count,
        s.shannon_number,
        s.transition.index,
        if s.transition.detected {
            ""
        } else {
            " (fallback)"
        }
    );
}

fn solve(graph: &Graph, solve: &SolveArgs, bandwidth: usize) -> Result<SpectralBasis> {
    let start = std::time::Instant::now();
    let basis = compute_basis(graph, solve.operator, bandwidth, solve.seed, solve.tol)
        .with_context(|| format!("computing the {} basis", solve.operator))?;
    log::info!(
        "{} basis of width {} in {:.2} s",
        solve.operator,
        basis.bandwidth(),
        start.elapsed().as_secs_f64()
    );
    Ok(basis)
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let cfg = roll_config(&args.roll, args.seed);
    let roll = generate_swiss_roll_detailed(&cfg)?;
    with_outputs(&args.out, |out| {
        let (edges, meta) = (args.out.join("roll.edges"), args.out.join("roll.nodes.csv"));
        save_graph(&roll.graph, &edges, &meta)?;
        out.written.extend([edges, meta]);
        out.write("selection.txt", |w| {
            for node in roll.selection.nodes() {
                writeln!(w, "{node}").map_err(|e| gslep_core::Error::io("selection.txt", e))?;
            }
            Ok(())
        })?;
        #[derive(Serialize)]
        struct RollInfo<'a> {
            config: &'a SwissRollConfig,
            node_count: usize,
            edge_count: usize,
            selection_size: usize,
            seed_node: usize,
        }
        out.json(
            "roll.json",
            &RollInfo {
                config: &cfg,
                node_count: roll.graph.node_count(),
                edge_count: roll.graph.edge_count(),
                selection_size: roll.selection.size(),
                seed_node: roll.seed_node,
            },
        )?;
        println!(
            "N={} edges={} selection={} seed_node={}",
            roll.graph.node_count(),
            roll.graph.edge_count(),
            roll.selection.size(),
            roll.seed_node
        );
        Ok(())
    })
}

pub fn ingest(args: &IngestArgs) -> Result<()> {
    let (graph, report) = match (&args.openflights, &args.airports, &args.routes) {
        (Some(dir), _, _) => load_openflights_dir(dir),
        (None, Some(a), Some(r)) => load_openflights(a, r),
        _ => bail!("give --openflights DIR or both --airports and --routes"),
    }
    .context("ingesting OpenFlights data")?;
    with_outputs(&args.out, |out| {
        let (edges, meta) = (
            args.out.join("airports.edges"),
            args.out.join("airports.nodes.csv"),
        );
        save_graph(&graph, &edges, &meta)?;
        out.written.extend([edges, meta]);
        out.json("ingest_report.json", &report)?;
        println!(
            "airports={} routes={} self_loops={} edges={} adjacency_nonzeros={} skipped_rows={}",
            report.airports_kept,
            report.routes_accepted,
            report.routes_self_loop,
            report.undirected_edges,
            report.adjacency_nonzeros,
            report.malformed_rows.len()
        );
        Ok(())
    })
}

#[derive(Serialize)]
struct EigenRow {
    k: usize,
    eigenvalue: f64,
    residual: f64,
}

pub fn spectrum(args: &SpectrumArgs) -> Result<()> {
    let input = load_input(&args.input, args.solve.seed)?;
    check_bandwidth(args.bandwidth, input.graph.node_count())?;
    let basis = solve(&input.graph, &args.solve, args.bandwidth)?.truncated(args.bandwidth)?;
    with_outputs(&args.out, |out| {
        let path = args.out.join("basis.json");
        save_basis(&basis, &path)?;
        out.written.push(path);
        let rows: Vec<EigenRow> = (0..basis.bandwidth())
            .map(|k| EigenRow {
                k: k + 1,
                eigenvalue: basis.values[k],
                residual: basis.residual_norms[k],
            })
            .collect();
        out.write("eigenvalues.csv", |w| write_rows(&rows, w))?;
        if let Some(cut) = basis.degenerate_cutoff() {
            log::warn!(
                "bandwidth {} splits a degenerate eigenvalue ({} vs next {})",
                cut.bandwidth,
                cut.last_value,
                cut.next_value
            );
        }
        println!(
            "operator={} W={} max_residual={:e}",
            basis.operator_kind,
            basis.bandwidth(),
            basis.max_residual()
        );
        Ok(())
    })
}

fn write_rows<T: Serialize>(rows: &[T], out: &mut dyn std::io::Write) -> gslep_core::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| gslep_core::Error::io("<output>", e))
}

pub fn slepian(args: &SlepianArgs) -> Result<()> {
    let input = load_input(&args.input, args.solve.seed)?;
    let graph = &input.graph;
    check_bandwidth(args.bandwidth, graph.node_count())?;
    let selection = selection_spec(&args.select, &input)?;
    let resolved = resolve_selection(graph, &selection)?;
    let wide = solve(graph, &args.solve, args.bandwidth)?;
    let basis = wide.truncated(args.bandwidth)?;
    let slepians = compute_slepians(&basis, &resolved)?;
    let spec = QuerySpec {
        selection,
        bandwidth: args.bandwidth,
        operator: args.solve.operator,
        axes: args.frame.axes,
        color_axis: args.frame.color_axis,
    };
    let frame = slepian_query(graph, &wide, &spec)?;
    with_outputs(&args.out, |out| {
        let path = args.out.join("basis.json");
        save_basis(&basis, &path)?;
        out.written.push(path);
        out.write("slepians.csv", |w| {
            write_slepian_table(graph, &slepians, slepians.vectors.cols(), w)
        })?;
        out.json(
            "summary.json",
            &SlepianSummary::new(args.solve.operator, &slepians),
        )?;
        out.write("spectrum.csv", |w| {
            write_spectrum_table(&spectrum_rows(&slepians), w)
        })?;
        out.write("frame.csv", |w| write_frame_table(&frame.frame.nodes, w))?;
        report(args.bandwidth, &slepians);
        Ok(())
    })
}

#[derive(Serialize)]
struct SweepEntry {
    bandwidth: usize,
    shannon_number: f64,
    transition_index: usize,
    transition_detected: bool,
    mu_sequence: Vec<f64>,
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let input = load_input(&args.input, args.solve.seed)?;
    let graph = &input.graph;
    let mut bandwidths = args.bandwidths.0.clone();
    bandwidths.sort_unstable();
    bandwidths.dedup();
    for &w in &bandwidths {
        check_bandwidth(w, graph.node_count())?;
    }
    let max_w = *bandwidths.last().expect("parser rejects empty lists");
    let selection = selection_spec(&args.select, &input)?;
    let resolved = resolve_selection(graph, &selection)?;
    // One basis at the largest bandwidth; smaller ones are column slices.
    let wide = solve(graph, &args.solve, max_w)?;
    with_outputs(&args.out, |out| {
        let path = args.out.join("basis.json");
        save_basis(&wide.truncated(max_w)?, &path)?;
        out.written.push(path);
        let mut rows: Vec<SpectrumRow> = Vec::new();
        let mut entries = Vec::new();
        for &w in &bandwidths {
            let slepians = compute_slepians(&wide.truncated(w)?, &resolved)?;
            report(w, &slepians);
            rows.extend(spectrum_rows(&slepians));
            let frame_fits = w > args.frame.axes.0.max(args.frame.axes.1)
                && args.frame.color_axis.is_none_or(|c| c < w);
            if !args.no_frames && frame_fits {
                let spec = QuerySpec {
                    selection: selection.clone(),
                    bandwidth: w,
                    operator: args.solve.operator,
                    axes: args.frame.axes,
                    color_axis: args.frame.color_axis,
                };
                let frame = slepian_query(graph, &wide, &spec)?;
                out.write(&format!("frame_W{w}.csv"), |f| {
                    write_frame_table(&frame.frame.nodes, f)
                })?;
            }
            entries.push(SweepEntry {
                bandwidth: w,
                shannon_number: slepians.shannon_number,
                transition_index: slepians.transition.index,
                transition_detected: slepians.transition.detected,
                mu_sequence: slepians.concentrations,
            });
        }
        out.write("mu_spectrum.csv", |f| write_spectrum_table(&rows, f))?;
        out.json("sweep.json", &entries)?;
        Ok(())
    })
}

pub fn embed_frame(args: &EmbedArgs) -> Result<()> {
    let input = load_input(&args.input, args.solve.seed)?;
    let graph = &input.graph;
    check_bandwidth(args.bandwidth, graph.node_count())?;
    let selection = selection_spec(&args.select, &input)?;
    if !args.raw {
        resolve_selection(graph, &selection)?;
    }
    let wide = solve(graph, &args.solve, args.bandwidth)?;
    let records = if args.raw {
        let basis = wide.truncated(args.bandwidth)?;
        let frame = embed(
            &basis.vectors,
            args.frame.axes,
            args.frame.color_axis,
            BasisKind::RawEigenvectors,
        )?;
        let planar = graph.position(0).is_some_and(|p| p.len() == 2);
        let styled = if planar {
            Some(geographic_overlay(&frame, graph)?)
        } else {
            None
        };
        frame_records(graph, &frame, styled.as_deref())
    } else {
        let spec = QuerySpec {
            selection,
            bandwidth: args.bandwidth,
            operator: args.solve.operator,
            axes: args.frame.axes,
            color_axis: args.frame.color_axis,
        };
        let result = slepian_query(graph, &wide, &spec)?;
        println!(
            "W={} S={} K={:.4} transition_index={}",
            result.bandwidth, result.selection_size, result.shannon_number, result.transition_index
        );
        result.frame.nodes
    };
    with_outputs(&args.out, |out| {
        out.write("frame.csv", |w| write_frame_table(&records, w))
    })
}

pub fn serve(args: &ServeArgs) -> Result<()> {
    let graph = match &args.graph {
        None => {
            log::warn!("no graph given; serving an empty session");
            None
        }
        Some(path) if path.is_dir() => Some(
            load_openflights_dir(path)
                .with_context(|| format!("loading OpenFlights data from {}", path.display()))?
                .0,
        ),
        Some(path) => Some(
            load_graph(path, args.meta.as_deref())
                .with_context(|| format!("loading graph {}", path.display()))?,
        ),
    };
    let config = gslep_service::ServiceConfig {
        listen: args.listen,
        default_operator: args.operator,
        w_max: args.w_max,
        seed: args.seed,
        tolerance: args.tol,
        static_dir: args.static_dir.clone(),
        precompute: !args.no_precompute,
    };
    let runtime = tokio::runtime::Runtime::new().context("starting the async runtime")?;
    runtime
        .block_on(gslep_service::serve(graph, config))
        .context("serving")
}
