use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::Value;

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),

    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    NotFound(String),

    #[error("unknown session `{0}`")]
    UnknownSession(String),

    #[error("unknown variant `{0}`")]
    UnknownVariant(String),

    #[error("session `{id}` is {status}; it no longer accepts changes")]
    Closed { id: String, status: &'static str },

    #[error("rejected events: {0}")]
    InvalidEvents(String),

    #[error("session is missing questions {missing:?}")]
    Incomplete { missing: Vec<u8> },

    #[error("no active model for variant {0}")]
    NoActiveModel(String),

    #[error("rejected model artifact: {0}")]
    Artifact(String),

    #[error("missing or wrong API token")]
    Unauthorized,

    #[error("storage failure: {0}")]
    Storage(#[from] std::io::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Serialize)]
struct Body<'a> {
    code: &'a str,
    message: String,
    details: Value,
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::Validation(_) => "validation_error",
            ServiceError::NotFound(_)
            | ServiceError::UnknownSession(_)
            | ServiceError::UnknownVariant(_) => "not_found",
            ServiceError::Closed { .. } => "session_closed",
            ServiceError::InvalidEvents(_) => "invalid_events",
            ServiceError::Incomplete { .. } => "incomplete_session",
            ServiceError::NoActiveModel(_) => "no_active_model",
            ServiceError::Artifact(_) => "invalid_artifact",
            ServiceError::Unauthorized => "unauthorized",
            ServiceError::Storage(_) | ServiceError::Internal(_) => "internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::BadRequest(_) | ServiceError::Artifact(_) => StatusCode::BAD_REQUEST,
            ServiceError::Validation(_)
            | ServiceError::InvalidEvents(_)
            | ServiceError::Incomplete { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::NotFound(_)
            | ServiceError::UnknownSession(_)
            | ServiceError::UnknownVariant(_) => StatusCode::NOT_FOUND,
            ServiceError::Closed { .. } | ServiceError::NoActiveModel(_) => StatusCode::CONFLICT,
            ServiceError::Unauthorized => StatusCode::UNAUTHORIZED,
            ServiceError::Storage(_) | ServiceError::Internal(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        }
    }

    fn details(&self) -> Value {
        match self {
            ServiceError::Incomplete { missing } => serde_json::json!({ "missing_qids": missing }),
            ServiceError::Closed { id, status } => {
                serde_json::json!({ "session_id": id, "status": status })
            }
            ServiceError::UnknownSession(id) => serde_json::json!({ "session_id": id }),
            _ => Value::Null,
        }
    }

    /// Map a core error raised while handling client input.
    pub(crate) fn from_core(e: lexiscreen_core::Error) -> ServiceError {
        use lexiscreen_core::Error as E;
        match e {
            E::IncompleteSession { missing } => ServiceError::Incomplete { missing },
            E::MalformedSession(m) => ServiceError::InvalidEvents(m),
            E::InvalidRecord(m) | E::InvalidArgument(m) => ServiceError::Validation(m),
            E::VectorLength { .. } => ServiceError::Internal(e.to_string()),
            E::Io(io) => ServiceError::Storage(io),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        let body = Body {
            code: self.code(),
            message: self.to_string(),
            details: self.details(),
        };
        (self.status(), Json(body)).into_response()
    }
}
