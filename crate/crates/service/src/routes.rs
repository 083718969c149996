use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use gslep_core::query::{check_bandwidth, resolve_selection, slepian_query};
use gslep_core::{compute_slepians, OperatorKind, QueryResult, QuerySpec, SelectionSpec};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::state::{AppState, LoggedQuery};

pub fn router(state: Arc<AppState>) -> Router {
    let mut router = Router::new()
        .route("/graph/summary", get(graph_summary))
        .route("/graph/nodes", get(graph_nodes))
        .route("/slepian/query", post(query_slepian))
        .route("/spectrum", get(spectrum))
        .route("/status", get(status));
    if let Some(dir) = &state.config.static_dir {
        router = router.fallback_service(tower_http::services::ServeDir::new(dir));
    }
    router.with_state(state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    #[serde(rename = "N")]
    pub node_count: usize,
    pub edge_count: usize,
    /// Sum of edge weights; for route networks this is the number of routes.
    pub total_edge_weight: f64,
    pub attribute_keys: Vec<String>,
    pub degree_min: f64,
    pub degree_max: f64,
    pub operators: Vec<OperatorKind>,
    pub default_operator: OperatorKind,
    pub w_max: usize,
}

async fn graph_summary(State(state): State<Arc<AppState>>) -> Result<Json<GraphSummary>, ApiError> {
    let graph = state.graph()?;
    let degrees = graph.degrees();
    Ok(Json(GraphSummary {
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        total_edge_weight: graph.total_weight() / 2.0,
        attribute_keys: graph.attribute_keys(),
        degree_min: degrees.iter().copied().fold(f64::INFINITY, f64::min),
        degree_max: degrees.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        operators: OperatorKind::ALL.to_vec(),
        default_operator: state.config.default_operator,
        w_max: state.config.w_max,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub id: usize,
    pub label: Option<String>,
    pub lon: Option<f64>,
    pub lat: Option<f64>,
    pub attributes: BTreeMap<String, String>,
    pub degree: f64,
}

async fn graph_nodes(State(state): State<Arc<AppState>>) -> Result<Json<Vec<NodeEntry>>, ApiError> {
    let graph = state.graph()?;
    let attrs = graph.metadata().attributes.as_ref();
    let nodes = (0..graph.node_count())
        .map(|i| {
            let planar = graph.position(i).filter(|p| p.len() == 2);
            NodeEntry {
                id: i,
                label: graph.label(i).map(str::to_string),
                lon: planar.map(|p| p[0]),
                lat: planar.map(|p| p[1]),
                attributes: attrs.map(|a| a[i].clone()).unwrap_or_default(),
                degree: graph.degree(i),
            }
        })
        .collect();
    Ok(Json(nodes))
}

fn default_axes() -> (usize, usize) {
    (0, 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRequest {
    pub selection: SelectionSpec,
    #[serde(rename = "W")]
    pub bandwidth: usize,
    pub operator: Option<OperatorKind>,
    #[serde(default = "default_axes")]
    pub axes: (usize, usize),
    pub color_axis: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub cache_hit: bool,
    pub basis_seconds: f64,
    pub query_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    #[serde(flatten)]
    pub result: QueryResult,
    pub timing: Timing,
}

fn describe(selection: &SelectionSpec) -> String {
    let mut text = serde_json::to_string(selection).unwrap_or_default();
    if text.len() > 200 {
        let cut = (0..=200)
            .rev()
            .find(|&i| text.is_char_boundary(i))
            .unwrap_or(0);
        text.truncate(cut);
        text.push_str("...");
    }
    text
}

async fn query_slepian(
    State(state): State<Arc<AppState>>,
    body: Result<Json<QueryRequest>, JsonRejection>,
) -> Result<Json<QueryResponse>, ApiError> {
    let Json(request) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let start = Instant::now();
    let operator = request.operator.unwrap_or(state.config.default_operator);
    let outcome = run_query(&state, operator, &request).await;
    state.record(LoggedQuery {
        endpoint: "/slepian/query",
        operator,
        bandwidth: request.bandwidth,
        selection: describe(&request.selection),
        status: outcome.as_ref().map_or_else(|e| e.status.as_u16(), |_| 200),
        seconds: start.elapsed().as_secs_f64(),
    });
    outcome.map(Json)
}

async fn run_query(
    state: &AppState,
    operator: OperatorKind,
    request: &QueryRequest,
) -> Result<QueryResponse, ApiError> {
    let graph = state.graph()?;
    let key = state.key_for(operator, request.bandwidth)?;
    // Reject bad selections before paying for a cold basis.
    resolve_selection(&graph, &request.selection)?;
    let cached = state.basis(key).await?;
    let spec = QuerySpec {
        selection: request.selection.clone(),
        bandwidth: request.bandwidth,
        operator,
        axes: request.axes,
        color_axis: request.color_axis,
    };
    let start = Instant::now();
    let basis = cached.basis.clone();
    let result = tokio::task::spawn_blocking(move || slepian_query(&graph, &basis, &spec))
        .await
        .map_err(|e| ApiError::internal(format!("query task failed: {e}")))??;
    Ok(QueryResponse {
        result,
        timing: Timing {
            cache_hit: cached.cache_hit,
            basis_seconds: cached.seconds,
            query_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

#[derive(Debug, Clone, Deserialize)]
pub struct SpectrumParams {
    pub operator: Option<OperatorKind>,
    #[serde(rename = "W")]
    pub bandwidth: usize,
    /// `key=value` attribute selection.
    pub select_attr: Option<String>,
    /// Comma-separated labels or indices.
    pub select_nodes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResponse {
    pub operator: OperatorKind,
    #[serde(rename = "W")]
    pub bandwidth: usize,
    pub eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_sequence: Option<Vec<f64>>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub shannon_number: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition_index: Option<usize>,
}

/// Operator eigenvalues of the first `W` basis vectors, plus the
/// concentration sequence when a selection is given.
async fn spectrum(
    State(state): State<Arc<AppState>>,
    params: Result<Query<SpectrumParams>, QueryRejection>,
) -> Result<Json<SpectrumResponse>, ApiError> {
    let Query(params) = params.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let graph = state.graph()?;
    let operator = params.operator.unwrap_or(state.config.default_operator);
    let selection = match (&params.select_attr, &params.select_nodes) {
        (Some(_), Some(_)) => {
            return Err(ApiError::bad_request(
                "give at most one of select_attr and select_nodes",
            ))
        }
        (Some(attr), None) => Some(SelectionSpec::parse_attribute(attr)?),
        (None, Some(nodes)) => Some(SelectionSpec::parse_nodes(nodes)),
        (None, None) => None,
    };
    check_bandwidth(params.bandwidth, graph.node_count())?;
    let selection = selection
        .map(|s| resolve_selection(&graph, &s))
        .transpose()?;
    let key = state.key_for(operator, params.bandwidth)?;
    let basis = state.basis(key).await?.basis.truncated(params.bandwidth)?;
    let mut response = SpectrumResponse {
        operator,
        bandwidth: params.bandwidth,
        eigenvalues: basis.values.clone(),
        selection_size: None,
        mu_sequence: None,
        shannon_number: None,
        transition_index: None,
    };
    if let Some(selection) = selection {
        let slepians = compute_slepians(&basis, &selection)?;
        response.selection_size = Some(selection.size());
        response.mu_sequence = Some(slepians.concentrations);
        response.shannon_number = Some(slepians.shannon_number);
        response.transition_index = Some(slepians.transition.index);
    }
    Ok(Json(response))
}

#[derive(Debug, Clone, Serialize)]
pub struct CachedEntry {
    pub operator: OperatorKind,
    pub width: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Status {
    pub graph_loaded: bool,
    pub cached_bases: Vec<CachedEntry>,
    pub recent_queries: Vec<LoggedQuery>,
}

async fn status(State(state): State<Arc<AppState>>) -> Json<Status> {
    Json(Status {
        graph_loaded: state.graph.is_some(),
        cached_bases: state
            .cached_keys()
            .into_iter()
            .map(|(operator, width)| CachedEntry { operator, width })
            .collect(),
        recent_queries: state.recent_queries(),
    })
}
