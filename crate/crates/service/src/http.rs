use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lexiscreen_core::InteractionEvent;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{Result, ServiceError};
use crate::service::{Demographics, Service};

/// Request bodies are parsed here rather than by axum's extractor so that
/// malformed JSON gets the same error shape as every other failure.
fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T> {
    serde_json::from_slice(body)
        .map_err(|e| ServiceError::BadRequest(format!("invalid JSON body: {e}")))
}

#[derive(Deserialize)]
struct EventBatch {
    seq: u64,
    #[serde(default)]
    events: Vec<InteractionEvent>,
}

async fn create_session(State(svc): State<Arc<Service>>, body: Bytes) -> Result<Response> {
    let demographics: Demographics = parse(&body)?;
    let created = svc.create_session(demographics)?;
    Ok((StatusCode::CREATED, Json(created)).into_response())
}

async fn append_events(
    State(svc): State<Arc<Service>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response> {
    let batch: EventBatch = parse(&body)?;
    Ok(Json(svc.append_events(&id, batch.seq, batch.events)?).into_response())
}

async fn finalize(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> Result<Response> {
    Ok(Json(svc.finalize(&id)?).into_response())
}

async fn get_session(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> Result<Response> {
    Ok(Json(svc.session_view(&id)?).into_response())
}

async fn upload_model(State(svc): State<Arc<Service>>, body: Bytes) -> Result<Response> {
    let info = svc.activate_model(&body)?;
    Ok((StatusCode::CREATED, Json(info)).into_response())
}

async fn active_models(State(svc): State<Arc<Service>>) -> Response {
    Json(serde_json::json!({ "models": svc.active_models() })).into_response()
}

async fn manifest(
    State(svc): State<Arc<Service>>,
    Path(variant): Path<String>,
) -> Result<Response> {
    Ok(Json(svc.manifest_for(&variant)?).into_response())
}

async fn not_found() -> ServiceError {
    ServiceError::NotFound("no such endpoint".into())
}

async fn require_token(State(svc): State<Arc<Service>>, req: Request, next: Next) -> Response {
    if let Some(token) = &svc.config().api_token {
        let presented = req
            .headers()
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "));
        if presented != Some(token.as_str()) {
            return ServiceError::Unauthorized.into_response();
        }
    }
    next.run(req).await
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(get_session))
        .route("/v1/sessions/{id}/events", post(append_events))
        .route("/v1/sessions/{id}/finalize", post(finalize))
        .route("/v1/models", post(upload_model))
        .route("/v1/models/active", get(active_models))
        .route("/v1/manifest/{variant}", get(manifest))
        .fallback(not_found)
        .layer(middleware::from_fn_with_state(
            service.clone(),
            require_token,
        ))
        .with_state(service)
}
