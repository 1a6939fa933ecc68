//! HTTP/JSON API over a workspace directory and a measure store, with a
//! server-sent event stream of KPI status changes and workspace revisions.
//!
//! Documents stay in their canonical text files on disk, so the CLI and the
//! service always read the same workspace.

mod error;
mod events;
mod routes;
mod state;

use std::net::SocketAddr;

pub use error::ApiError;
pub use events::Event;
pub use routes::{router, REVISION_HEADER};
pub use state::{AppState, DocumentEntry, IngestOutcome, LoadError, PutBody, ServiceConfig, Snapshot, WriteOutcome};

/// Binds `addr` and serves until the process ends.
pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
