use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use saf_core::archtrace::{impacts_of_element, trace_kpi};
use saf_core::dsl::serialize_document;
use saf_core::guidance::{checklist_report, classify_impact, suggest_effects, Answer};
use saf_core::kpi::{rfc3339, status_json, KpiSpec};
use saf_core::model::{DocumentKind, Identifier};
use saf_core::render::{render, RenderFormat};
use saf_core::validation::validate;
use serde::Deserialize;
use serde_json::json;

use crate::error::ApiError;
use crate::events;
use crate::state::{AppState, PutBody};

pub const REVISION_HEADER: &str = "x-saf-revision";

type ApiResult = Result<Response, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/workspace", get(workspace))
        .route("/api/models/{kind}/{id}", get(get_model).put(put_model))
        .route("/api/models/dm/{id}/render", get(render_dm))
        .route("/api/validate", post(validate_all))
        .route("/api/guidance/decision-graph/step", post(step))
        .route("/api/guidance/checklist", get(checklist))
        .route("/api/suggestions", get(suggestions))
        .route("/api/measures", post(measures))
        .route("/api/kpis", get(kpis))
        .route("/api/kpis/{id}/status", get(kpi_status))
        .route("/api/kpis/{id}/trace", get(kpi_trace))
        .route("/api/elements/{id}/impacts", get(element_impacts))
        .route("/api/events", get(events_stream))
        .fallback(|| async { ApiError::not_found("not_found", "no such endpoint") })
        .with_state(state)
}

fn with_revision(revision: u64, response: impl IntoResponse) -> Response {
    let mut r = response.into_response();
    r.headers_mut().insert(REVISION_HEADER, HeaderValue::from(revision));
    r
}

fn json_text(revision: u64, status: StatusCode, body: String) -> Response {
    with_revision(revision, (status, [(header::CONTENT_TYPE, "application/json")], body))
}

fn kind_of(kind: &str) -> Result<DocumentKind, ApiError> {
    DocumentKind::parse(kind).ok_or_else(|| ApiError::not_found("unknown_kind", format!("unknown document kind `{kind}`")))
}

fn identifier(id: &str, what: &str) -> Result<Identifier, ApiError> {
    Identifier::new(id).map_err(|_| ApiError::not_found(&format!("unknown_{what}"), format!("no {what} `{id}`")))
}

fn parse_at(at: Option<&str>) -> Result<DateTime<Utc>, ApiError> {
    match at {
        None => Ok(Utc::now()),
        Some(s) => rfc3339::parse(s).map_err(|e| ApiError::bad_request(format!("`at` must be an RFC 3339 timestamp: {e}"))),
    }
}

async fn workspace(State(state): State<AppState>) -> Response {
    let snap = state.snapshot();
    let body = json!({ "revision": snap.revision, "documents": state.index(&snap) });
    with_revision(snap.revision, Json(body))
}

async fn get_model(State(state): State<AppState>, Path((kind, id)): Path<(String, String)>) -> ApiResult {
    let kind = kind_of(&kind)?;
    let snap = state.snapshot();
    let doc = snap
        .workspace
        .document(kind, &id)
        .ok_or_else(|| ApiError::not_found("unknown_document", format!("no {kind} document `{id}`")))?;
    let file = state
        .index(&snap)
        .into_iter()
        .find(|e| e.kind == kind && e.id.as_str() == id)
        .map(|e| e.file);
    let body = json!({
        "revision": snap.revision,
        "kind": kind,
        "id": id,
        "file": file,
        "text": serialize_document(&doc),
        "document": doc.to_json(),
    });
    let mut r = with_revision(snap.revision, Json(body));
    r.headers_mut()
        .insert(header::ETAG, HeaderValue::from_str(&format!("\"{}\"", snap.revision)).expect("ascii"));
    Ok(r)
}

fn if_match(headers: &HeaderMap) -> Result<Option<u64>, ApiError> {
    let Some(v) = headers.get(header::IF_MATCH) else {
        return Ok(None);
    };
    let s = v.to_str().unwrap_or("").trim().trim_start_matches("W/").trim_matches('"');
    s.parse()
        .map(Some)
        .map_err(|_| ApiError::bad_request(format!("If-Match must carry a revision number, got `{s}`")))
}

async fn put_model(
    State(state): State<AppState>,
    Path((kind, id)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let kind = kind_of(&kind)?;
    let id = Identifier::new(id.as_str()).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let expected = if_match(&headers)?;
    let is_json = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("application/json"));
    let body = if is_json {
        PutBody::Json(serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("malformed JSON: {e}")))?)
    } else {
        PutBody::Text(String::from_utf8(body.to_vec()).map_err(|_| ApiError::bad_request("body is not valid UTF-8"))?)
    };
    let outcome = state.put_document(kind, id, body, expected).await?;
    let status = if outcome.created { StatusCode::CREATED } else { StatusCode::OK };
    Ok(with_revision(outcome.revision, (status, Json(outcome))))
}

#[derive(Deserialize)]
struct RenderQuery {
    format: Option<String>,
}

async fn render_dm(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<RenderQuery>) -> ApiResult {
    let format: RenderFormat = q.format.as_deref().unwrap_or("svg").parse().map_err(ApiError::bad_request)?;
    let snap = state.snapshot();
    let dm = snap
        .workspace
        .decision_map(&id)
        .ok_or_else(|| ApiError::not_found("unknown_document", format!("no dm document `{id}`")))?;
    let body = render(dm, format, &state.config().tool.render);
    Ok(with_revision(snap.revision, ([(header::CONTENT_TYPE, format.content_type())], body)))
}

async fn validate_all(State(state): State<AppState>) -> Response {
    let snap = state.snapshot();
    let diagnostics = validate(&snap.workspace, &state.config().tool.lint);
    with_revision(snap.revision, Json(json!({ "revision": snap.revision, "diagnostics": diagnostics })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRequest {
    answers: Vec<String>,
}

async fn step(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let req: StepRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("expected {{\"answers\": [...]}}: {e}")))?;
    let answers: Vec<Answer> = req
        .answers
        .iter()
        .map(|a| a.parse())
        .collect::<Result<_, String>>()
        .map_err(ApiError::bad_request)?;
    let c = classify_impact(&state.config().tool.graph, &answers)
        .map_err(|d| ApiError::from_diagnostic(StatusCode::BAD_REQUEST, d))?;
    Ok(with_revision(state.snapshot().revision, Json(c)))
}

async fn checklist(State(state): State<AppState>) -> Response {
    let snap = state.snapshot();
    with_revision(snap.revision, Json(checklist_report(&snap.workspace, &state.config().tool.checklist)))
}

#[derive(Deserialize)]
struct SuggestQuery {
    dm: Option<String>,
}

async fn suggestions(State(state): State<AppState>, Query(q): Query<SuggestQuery>) -> ApiResult {
    let id = q.dm.ok_or_else(|| ApiError::bad_request("missing `dm` query parameter"))?;
    let snap = state.snapshot();
    let dm = snap
        .workspace
        .decision_map(&id)
        .ok_or_else(|| ApiError::not_found("unknown_document", format!("no dm document `{id}`")))?;
    Ok(with_revision(snap.revision, Json(suggest_effects(dm, &snap.workspace.matrices))))
}

#[derive(Deserialize)]
struct IngestQuery {
    at: Option<String>,
    #[serde(default)]
    strict: bool,
}

async fn measures(State(state): State<AppState>, Query(q): Query<IngestQuery>, body: Bytes) -> ApiResult {
    let at = parse_at(q.at.as_deref())?;
    let text = String::from_utf8(body.to_vec()).map_err(|_| ApiError::bad_request("body is not valid UTF-8"))?;
    let outcome = state
        .ingest(&text, q.strict, at)
        .await
        .map_err(|e| ApiError::internal(format!("cannot append to the measure store: {e}")))?;
    let status = if outcome.report.has_malformed() { StatusCode::BAD_REQUEST } else { StatusCode::OK };
    Ok(with_revision(state.snapshot().revision, (status, Json(outcome))))
}

async fn kpis(State(state): State<AppState>) -> Response {
    let snap = state.snapshot();
    let specs: Vec<&KpiSpec> = snap.workspace.kpis().collect();
    with_revision(snap.revision, Json(specs))
}

#[derive(Deserialize)]
struct AtQuery {
    at: Option<String>,
}

async fn kpi_status(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<AtQuery>) -> ApiResult {
    let at = parse_at(q.at.as_deref())?;
    let revision = state.snapshot().revision;
    let status = state
        .status(&id, at)
        .await
        .ok_or_else(|| ApiError::not_found("unknown_kpi", format!("no KPI `{id}`")))?;
    Ok(json_text(revision, StatusCode::OK, status_json(&status)))
}

async fn kpi_trace(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let snap = state.snapshot();
    let t = trace_kpi(&snap.workspace, &id).map_err(|d| ApiError::from_diagnostic(StatusCode::NOT_FOUND, d))?;
    Ok(with_revision(snap.revision, Json(t)))
}

async fn element_impacts(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let snap = state.snapshot();
    identifier(&id, "element")?;
    let i = impacts_of_element(&snap.workspace, &id).map_err(|d| ApiError::from_diagnostic(StatusCode::NOT_FOUND, d))?;
    Ok(with_revision(snap.revision, Json(i)))
}

async fn events_stream(State(state): State<AppState>) -> Response {
    let revision = state.snapshot().revision;
    with_revision(revision, events::sse(state.subscribe()))
}
