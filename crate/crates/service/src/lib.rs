//! HTTP service for live screening sessions.
//!
//! Sessions are opened with the participant's questionnaire answers, fed
//! event batches while the test runs, and finalized into a risk prediction
//! with the active model for their age variant. Everything is persisted as
//! JSON-lines files under one data directory.

mod error;
mod http;
mod registry;
mod service;
mod store;

use std::net::SocketAddr;
use std::sync::Arc;

pub use error::{Result, ServiceError};
pub use http::router;
pub use registry::{model_version, ActiveModel, ModelInfo, Registry};
pub use service::{
    Ack, CreatedSession, Demographics, FinalizeResult, Prediction, Service, ServiceConfig,
    SessionStatus, SessionView,
};

/// Serve the API on `addr` until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let service = Service::open(config).map_err(std::io::Error::other)?;
    let app = router(Arc::new(service));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
