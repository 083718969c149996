use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use gslep_core::Error;
use serde::Serialize;

/// JSON error body. `unknown_nodes` itemizes a rejected selection and
/// `diagnostics` carries solver details for failed basis computations.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unknown_nodes: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: error.into(),
                unknown_nodes: None,
                diagnostics: None,
            },
        }
    }

    pub fn no_graph() -> Self {
        Self::new(StatusCode::SERVICE_UNAVAILABLE, "no graph loaded")
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        match err {
            Error::UnknownNodes(nodes) => {
                let mut e = Self::bad_request(format!("{} unknown node(s)", nodes.len()));
                e.body.unknown_nodes = Some(nodes);
                e
            }
            Error::BandwidthOutOfRange { .. }
            | Error::EmptySelection
            | Error::SelectionOutOfRange { .. }
            | Error::NoMatch { .. }
            | Error::AxisOutOfRange { .. }
            | Error::DuplicateAxes(_)
            | Error::InvalidConfig(_) => Self::bad_request(err.to_string()),
            Error::NonConvergence { .. } | Error::DenseNoConvergence { .. } => {
                let mut e = Self::internal("basis computation failed");
                e.body.diagnostics = Some(err.to_string());
                e
            }
            other => Self::internal(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
