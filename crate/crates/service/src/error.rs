use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use saf_core::diag::Diagnostic;
use serde::Serialize;

/// Every error body is `{code, message}`, plus the diagnostics behind a 422.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            status,
            code: code.into(),
            message: message.into(),
            diagnostics: Vec::new(),
        }
    }

    pub fn not_found(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn conflict(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "revision_conflict", message)
    }

    pub fn unprocessable(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    /// A rejected document. The code is that of the first error.
    pub fn invalid(diagnostics: Vec<Diagnostic>) -> Self {
        let first = diagnostics.iter().find(|d| d.is_error()).or(diagnostics.first());
        let (code, message) = match first {
            Some(d) => (d.code.to_string(), d.to_string()),
            None => ("invalid_document".to_string(), "document rejected".to_string()),
        };
        Self {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            code,
            message,
            diagnostics,
        }
    }

    /// Maps a diagnostic onto a status code.
    pub fn from_diagnostic(status: StatusCode, d: Diagnostic) -> Self {
        Self::new(status, d.code.to_string(), d.message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}
