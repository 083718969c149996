//! HTTP front end for interactive graph Slepian queries.
//!
//! The graph is loaded once; eigenbases are cached per `(operator, width)`
//! and each query only solves the small concentration problem. Endpoints:
//!
//! - `GET /graph/summary`
//! - `GET /graph/nodes`
//! - `POST /slepian/query`
//! - `GET /spectrum?operator=&W=[&select_attr=key=value|&select_nodes=A,B]`
//! - `GET /status`

pub mod error;
pub mod routes;
pub mod state;

use std::sync::Arc;

use gslep_core::Graph;

pub use error::{ApiError, ErrorBody};
pub use routes::{router, GraphSummary, NodeEntry, QueryRequest, QueryResponse, SpectrumResponse};
pub use state::{AppState, ServiceConfig};

/// Starts computing the default basis in the background.
pub fn spawn_precompute(state: Arc<AppState>) -> Option<tokio::task::JoinHandle<()>> {
    let graph = state.graph.clone()?;
    let width = state.config.w_max.min(graph.node_count().saturating_sub(1));
    let key = state.key_for(state.config.default_operator, width).ok()?;
    Some(tokio::spawn(async move {
        match state.basis(key).await {
            Ok(b) => log::info!(
                "precomputed {} basis of width {} in {:.2} s",
                key.0,
                key.1,
                b.seconds
            ),
            Err(e) => log::warn!("precompute failed: {}", e.body.error),
        }
    }))
}

/// Serves until interrupted.
pub async fn serve(graph: Option<Graph>, config: ServiceConfig) -> std::io::Result<()> {
    let listen = config.listen;
    let precompute = config.precompute;
    let state = AppState::new(graph, config);
    if precompute {
        spawn_precompute(state.clone());
    }
    let listener = tokio::net::TcpListener::bind(listen).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
