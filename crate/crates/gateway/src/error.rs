use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use epiplan::Error;
use serde::Serialize;
use serde_json::{json, Value};

/// The JSON error body every endpoint returns on failure.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub details: Vec<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            details: Vec::new(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let message = err.to_string();
        let (status, code, details) = match &err {
            Error::Validation(v) => (
                StatusCode::BAD_REQUEST,
                "validation_failed",
                v.0.iter()
                    .map(|f| json!({ "field": f.field, "message": f.message }))
                    .collect(),
            ),
            Error::Input { path, diagnostics } => (
                StatusCode::BAD_REQUEST,
                "invalid_input",
                diagnostics
                    .iter()
                    .map(|d| json!({ "file": path, "line": d.line, "message": d.message }))
                    .collect(),
            ),
            Error::Network(_) => (StatusCode::BAD_REQUEST, "invalid_network", vec![]),
            Error::EmptyCurve | Error::Parameter(_) => {
                (StatusCode::BAD_REQUEST, "invalid_parameter", vec![])
            }
            Error::UnknownScenario(_) => (StatusCode::NOT_FOUND, "unknown_scenario", vec![]),
            Error::UnknownCounty(_) => (StatusCode::NOT_FOUND, "unknown_county", vec![]),
            Error::BranchHistory { .. } => (StatusCode::CONFLICT, "branch_history", vec![]),
            Error::NotRun(_) => (StatusCode::CONFLICT, "not_run", vec![]),
            Error::DayOutOfRange { .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "day_out_of_range", vec![])
            }
            Error::UnknownMetric(_) => (StatusCode::UNPROCESSABLE_ENTITY, "unknown_metric", vec![]),
            Error::HorizonExceeded { .. }
            | Error::Io { .. }
            | Error::Json { .. }
            | Error::Csv(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", vec![]),
        };
        Self {
            status,
            code,
            message,
            details,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
