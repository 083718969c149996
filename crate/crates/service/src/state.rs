use std::collections::{HashMap, VecDeque};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use gslep_core::{basis_width, compute_basis, Graph, OperatorKind, SpectralBasis};
use serde::Serialize;
use tokio::sync::OnceCell;

use crate::error::ApiError;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";
pub const REQUEST_LOG_CAPACITY: usize = 64;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub default_operator: OperatorKind,
    /// Width of the basis precomputed at startup.
    pub w_max: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub static_dir: Option<PathBuf>,
    pub precompute: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            listen: DEFAULT_LISTEN.parse().expect("valid default address"),
            default_operator: OperatorKind::Modularity,
            w_max: gslep_core::DEFAULT_BASIS_WIDTH,
            seed: 0,
            tolerance: gslep_core::SolverConfig::new(1).tolerance,
            static_dir: None,
            precompute: true,
        }
    }
}

/// Cache key: operator and basis width, the latter always from [`basis_width`].
pub type BasisKey = (OperatorKind, usize);

type Slot = Arc<OnceCell<Arc<SpectralBasis>>>;

#[derive(Debug, Clone, Serialize)]
pub struct LoggedQuery {
    pub endpoint: &'static str,
    pub operator: OperatorKind,
    pub bandwidth: usize,
    pub selection: String,
    pub status: u16,
    pub seconds: f64,
}

pub struct CachedBasis {
    pub basis: Arc<SpectralBasis>,
    pub cache_hit: bool,
    pub seconds: f64,
}

/// Shared, immutable-after-load session state.
pub struct AppState {
    pub graph: Option<Arc<Graph>>,
    pub config: ServiceConfig,
    cache: Mutex<HashMap<BasisKey, Slot>>,
    log: Mutex<VecDeque<LoggedQuery>>,
}

impl AppState {
    pub fn new(graph: Option<Graph>, config: ServiceConfig) -> Arc<Self> {
        Arc::new(Self {
            graph: graph.map(Arc::new),
            config,
            cache: Mutex::new(HashMap::new()),
            log: Mutex::new(VecDeque::with_capacity(REQUEST_LOG_CAPACITY)),
        })
    }

    pub fn graph(&self) -> Result<Arc<Graph>, ApiError> {
        self.graph.clone().ok_or_else(ApiError::no_graph)
    }

    pub fn key_for(&self, operator: OperatorKind, bandwidth: usize) -> Result<BasisKey, ApiError> {
        let graph = self.graph()?;
        gslep_core::query::check_bandwidth(bandwidth, graph.node_count())?;
        Ok((operator, basis_width(bandwidth, graph.node_count())))
    }

    pub fn cached_keys(&self) -> Vec<BasisKey> {
        let cache = self.cache.lock().expect("cache lock");
        let mut keys: Vec<BasisKey> = cache
            .iter()
            .filter(|(_, slot)| slot.initialized())
            .map(|(k, _)| *k)
            .collect();
        keys.sort_by_key(|(op, w)| (op.as_str(), *w));
        keys
    }

    /// Returns the basis for `key`, computing it at most once per key.
    /// A failed computation leaves the slot empty so a later request retries.
    pub async fn basis(&self, key: BasisKey) -> Result<CachedBasis, ApiError> {
        let graph = self.graph()?;
        let slot = {
            let mut cache = self.cache.lock().expect("cache lock");
            cache.entry(key).or_default().clone()
        };
        if let Some(basis) = slot.get() {
            return Ok(CachedBasis {
                basis: basis.clone(),
                cache_hit: true,
                seconds: 0.0,
            });
        }
        let start = Instant::now();
        let (seed, tol) = (self.config.seed, self.config.tolerance);
        let mut computed = false;
        let basis = slot
            .get_or_try_init(|| {
                computed = true;
                async move {
                    let (kind, width) = key;
                    log::info!("computing {kind} basis of width {width}");
                    tokio::task::spawn_blocking(move || {
                        compute_basis(&graph, kind, width, seed, tol).map(Arc::new)
                    })
                    .await
                    .map_err(|e| ApiError::internal(format!("basis task failed: {e}")))?
                    .map_err(ApiError::from)
                }
            })
            .await?
            .clone();
        Ok(CachedBasis {
            basis,
            cache_hit: !computed,
            seconds: start.elapsed().as_secs_f64(),
        })
    }

    pub fn record(&self, entry: LoggedQuery) {
        let mut log = self.log.lock().expect("log lock");
        if log.len() == REQUEST_LOG_CAPACITY {
            log.pop_front();
        }
        log.push_back(entry);
    }

    pub fn recent_queries(&self) -> Vec<LoggedQuery> {
        self.log.lock().expect("log lock").iter().cloned().collect()
    }
}
