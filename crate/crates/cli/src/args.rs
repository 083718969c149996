use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use gslep_core::spectral::DEFAULT_TOLERANCE;
use gslep_core::OperatorKind;

#[derive(Debug, Parser)]
#[command(name = "gslep", version, about = "Graph Slepian analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a Swiss-roll graph with its subgraph selection.
    Generate(GenerateArgs),
    /// Build the route graph from OpenFlights airport and route files.
    Ingest(IngestArgs),
    /// Compute the extreme eigenvectors of a graph operator.
    Spectrum(SpectrumArgs),
    /// Compute Slepian vectors for one bandwidth and selection.
    Slepian(SlepianArgs),
    /// Compute concentration spectra over a list of bandwidths.
    Sweep(SweepArgs),
    /// Export a 2-D embedding frame.
    Embed(EmbedArgs),
    /// Run the HTTP query service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RollArgs {
    /// Number of sampled points.
    #[arg(long = "nodes", default_value_t = gslep_core::datasets::swiss_roll::REFERENCE_NODE_COUNT)]
    pub node_count: usize,
    /// Weight threshold below which kernel edges are dropped.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Selection radius around the seed node.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Kernel scale; defaults to the reference scale widened for smaller rolls.
    #[arg(long)]
    pub kernel_scale: Option<f64>,
}

/// Exactly one graph source.
#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("input").required(true).multiple(false)))]
pub struct InputArgs {
    /// Edge list (`i j weight` lines).
    #[arg(long, group = "input")]
    pub edges: Option<PathBuf>,
    /// Node metadata CSV written alongside an edge list.
    #[arg(long, requires = "edges")]
    pub meta: Option<PathBuf>,
    /// Directory holding OpenFlights `airports.dat` and `routes.dat`.
    #[arg(long, group = "input")]
    pub openflights: Option<PathBuf>,
    /// Generate a Swiss roll in memory; its subgraph is the default selection.
    #[arg(long, group = "input")]
    pub swiss_roll: bool,
    #[command(flatten)]
    pub roll: RollArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long, default_value = "modularity")]
    pub operator: OperatorKind,
    /// Seed for the eigensolver start vector and the Swiss-roll sampler.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Residual tolerance of the eigensolver.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
}

/// At most one selection; without one the whole graph is selected
/// (or the generated subgraph for Swiss-roll input).
#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("selection").multiple(false)))]
pub struct SelectArgs {
    /// Attribute query `key=value`, e.g. `continent=Europe`.
    #[arg(long, group = "selection")]
    pub select_attr: Option<String>,
    /// Comma-separated node labels or indices.
    #[arg(long, group = "selection")]
    pub select_nodes: Option<String>,
    /// File with one node label or index per line.
    #[arg(long, group = "selection")]
    pub select_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FrameArgs {
    /// Basis vectors used as the x and y coordinates (0-based).
    #[arg(long, value_parser = parse_axes, default_value = "0,1")]
    pub axes: (usize, usize),
    /// Basis vector used for colour instead of the polar angle.
    #[arg(long)]
    pub color_axis: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub roll: RollArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "gslep-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["openflights", "airports"])))]
pub struct IngestArgs {
    #[arg(long)]
    pub openflights: Option<PathBuf>,
    #[arg(long, requires = "routes")]
    pub airports: Option<PathBuf>,
    #[arg(long, requires = "airports")]
    pub routes: Option<PathBuf>,
    #[arg(long, default_value = "gslep-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub bandwidth: usize,
    #[arg(long, default_value = "gslep-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SlepianArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[command(flatten)]
    pub select: SelectArgs,
    #[command(flatten)]
    pub frame: FrameArgs,
    #[arg(long)]
    pub bandwidth: usize,
    #[arg(long, default_value = "gslep-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[command(flatten)]
    pub select: SelectArgs,
    #[command(flatten)]
    pub frame: FrameArgs,
    /// Bandwidths as a list (`10,20,40,80`) or an inclusive range (`2..130`).
    #[arg(long = "bandwidth", value_parser = parse_bandwidths)]
    pub bandwidths: Bandwidths,
    /// Skip the per-bandwidth embedding frames.
    #[arg(long)]
    pub no_frames: bool,
    #[arg(long, default_value = "gslep-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[command(flatten)]
    pub select: SelectArgs,
    #[command(flatten)]
    pub frame: FrameArgs,
    #[arg(long)]
    pub bandwidth: usize,
    /// Embed raw eigenvectors instead of Slepian vectors; ignores the selection.
    #[arg(long)]
    pub raw: bool,
    #[arg(long, default_value = "gslep-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Edge list file or OpenFlights directory; without it the service
    /// starts empty and rejects graph requests.
    #[arg(long, env = "GSLEP_GRAPH")]
    pub graph: Option<PathBuf>,
    /// Node metadata CSV for an edge-list graph.
    #[arg(long, env = "GSLEP_META", requires = "graph")]
    pub meta: Option<PathBuf>,
    #[arg(long, env = "GSLEP_LISTEN", default_value = gslep_service::state::DEFAULT_LISTEN)]
    pub listen: SocketAddr,
    /// Operator used when a request names none, and precomputed at startup.
    #[arg(long, env = "GSLEP_OPERATOR", default_value = "modularity")]
    pub operator: OperatorKind,
    /// Width of the basis precomputed at startup.
    #[arg(long, env = "GSLEP_W_MAX", default_value_t = gslep_core::DEFAULT_BASIS_WIDTH)]
    pub w_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Directory of static files served for unmatched paths.
    #[arg(long, env = "GSLEP_STATIC_DIR")]
    pub static_dir: Option<PathBuf>,
    #[arg(long)]
    pub no_precompute: bool,
}

fn parse_axes(text: &str) -> Result<(usize, usize), String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("axes `{text}` are not `a,b`"))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|e| format!("axis `{s}`: {e}"))
    };
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bandwidths(pub Vec<usize>);

/// Parses a comma list whose items are single values or inclusive `a..b` ranges.
fn parse_bandwidths(text: &str) -> Result<Bandwidths, String> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|e| format!("bandwidth `{s}`: {e}"))
    };
    let mut out = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if lo > hi {
                    return Err(format!("empty bandwidth range `{part}`"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(parse(part)?),
        }
    }
    if out.is_empty() {
        return Err("no bandwidths given".into());
    }
    Ok(Bandwidths(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_lists_and_ranges() {
        assert_eq!(
            parse_bandwidths("10,20,40,80").unwrap().0,
            vec![10, 20, 40, 80]
        );
        assert_eq!(parse_bandwidths("2..5").unwrap().0, vec![2, 3, 4, 5]);
        assert_eq!(parse_bandwidths("1,3..4").unwrap().0, vec![1, 3, 4]);
        assert!(parse_bandwidths("5..2").is_err());
        assert!(parse_bandwidths("x").is_err());
    }

    #[test]
    fn axes_parse() {
        assert_eq!(parse_axes("1, 2").unwrap(), (1, 2));
        assert!(parse_axes("1").is_err());
    }

    #[test]
    fn command_line_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
