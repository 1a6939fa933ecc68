use std::convert::Infallible;

use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use futures::stream::{self, Stream};
use saf_core::kpi::{KpiState, KpiStatus};
use saf_core::model::Identifier;
use serde::Serialize;
use tokio::sync::broadcast::{self, error::RecvError};

/// What the event stream publishes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Event {
    /// A KPI changed state. `fired` lists the actions of an entry into
    /// `missed` and is empty otherwise.
    KpiStatus {
        status: KpiStatus,
        from: KpiState,
        fired: Vec<Identifier>,
    },
    /// The workspace moved to a new revision.
    Revision { revision: u64 },
}

impl Event {
    pub fn name(&self) -> &'static str {
        match self {
            Event::KpiStatus { .. } => "kpi_status",
            Event::Revision { .. } => "revision",
        }
    }

    fn to_sse(&self) -> SseEvent {
        SseEvent::default()
            .event(self.name())
            .data(serde_json::to_string(self).expect("events serialize"))
    }
}

/// Turns a subscription into an SSE stream. A consumer that falls behind
/// gets a `lagged` marker with the number of dropped events and continues
/// from the oldest retained one.
pub fn sse(rx: broadcast::Receiver<Event>) -> Sse<impl Stream<Item = Result<SseEvent, Infallible>>> {
    let events = stream::unfold(rx, |mut rx| async move {
        let item = match rx.recv().await {
            Ok(e) => e.to_sse(),
            Err(RecvError::Lagged(n)) => SseEvent::default().event("lagged").data(format!("{{\"dropped\":{n}}}")),
            Err(RecvError::Closed) => return None,
        };
        Some((Ok(item), rx))
    });
    Sse::new(events).keep_alive(KeepAlive::default())
}
