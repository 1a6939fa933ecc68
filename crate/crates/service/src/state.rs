use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use chrono::{DateTime, Utc};
use saf_core::config::ToolConfig;
use saf_core::diag::{has_errors, sort_diagnostics, Diagnostic};
use saf_core::dsl::{file_name, model_files, parse_document, parse_document_bytes, serialize_document};
use saf_core::ingest::{IngestOptions, IngestReport, MetricCatalog, PersistentStore, StoreError};
use saf_core::kpi::{detect_transitions, evaluate, evaluate_all, KpiState, KpiStatus};
use saf_core::model::{resolve_workspace, Document, DocumentKind, Identifier, Workspace};
use saf_core::validation::validate;
use serde::Serialize;
use tokio::sync::{broadcast, Mutex};

use crate::error::ApiError;
use crate::events::Event;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub workspace: PathBuf,
    pub store: PathBuf,
    pub tool: ToolConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read workspace {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("workspace does not load ({} error(s))", .0.iter().filter(|d| d.is_error()).count())]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// An immutable view of the workspace at one revision.
#[derive(Debug)]
pub struct Snapshot {
    pub revision: u64,
    pub workspace: Workspace,
    files: BTreeMap<(DocumentKind, Identifier), PathBuf>,
}

impl Snapshot {
    pub fn file(&self, kind: DocumentKind, id: &Identifier) -> Option<&Path> {
        self.files.get(&(kind, id.clone())).map(PathBuf::as_path)
    }
}

#[derive(Debug, Serialize)]
pub struct DocumentEntry {
    pub kind: DocumentKind,
    pub id: Identifier,
    pub file: String,
}

#[derive(Debug, Serialize)]
pub struct WriteOutcome {
    pub revision: u64,
    pub created: bool,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Serialize)]
pub struct IngestOutcome {
    #[serde(flatten)]
    pub report: IngestReport,
    pub transitions: Vec<saf_core::kpi::Transition>,
}

struct Inner {
    config: ServiceConfig,
    snapshot: RwLock<Arc<Snapshot>>,
    write_gate: Mutex<()>,
    store: tokio::sync::RwLock<PersistentStore>,
    statuses: Mutex<BTreeMap<Identifier, KpiStatus>>,
    events: broadcast::Sender<Event>,
}

/// Shared service state. Readers take the current snapshot; writers are
/// serialized and swap in a new snapshot only after it validated.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

const EVENT_BUFFER: usize = 256;

fn display_name(root: &Path, path: &Path) -> String {
    path.strip_prefix(root).unwrap_or(path).display().to_string()
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> LoadError + '_ {
    move |source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl AppState {
    /// Loads the workspace and opens the store. The initial KPI states are
    /// evaluated at `now` and serve as the baseline for transitions.
    pub fn load(config: ServiceConfig, now: DateTime<Utc>) -> Result<Self, LoadError> {
        let mut paths: Vec<PathBuf> = model_files(&config.workspace).map_err(io_error(&config.workspace))?;
        if let Some(dir) = &config.tool.matrices_dir {
            let extra = model_files(dir).map_err(io_error(dir))?;
            paths.extend(extra.into_iter().filter(|p| DocumentKind::from_path(p) == Some(DocumentKind::Matrix)));
        }
        let mut docs = Vec::new();
        let mut files = BTreeMap::new();
        let mut diags = Vec::new();
        for path in paths {
            let kind = DocumentKind::from_path(&path).expect("model_files filters by kind");
            let bytes = std::fs::read(&path).map_err(io_error(&path))?;
            let r = parse_document_bytes(kind, &bytes, &display_name(&config.workspace, &path));
            diags.extend(r.diagnostics);
            if let Some(doc) = r.document {
                files.insert((kind, doc.id().clone()), path);
                docs.push(doc);
            }
        }
        if has_errors(&diags) {
            sort_diagnostics(&mut diags);
            return Err(LoadError::Invalid(diags));
        }
        let workspace = resolve_workspace(docs).map_err(LoadError::Invalid)?;
        let (store, _warnings) = PersistentStore::open(&config.store)?;
        let statuses = evaluate_all(&workspace, store.store(), now)
            .into_iter()
            .map(|s| (s.kpi_id.clone(), s))
            .collect();
        let (events, _) = broadcast::channel(EVENT_BUFFER);
        Ok(Self(Arc::new(Inner {
            config,
            snapshot: RwLock::new(Arc::new(Snapshot {
                revision: 1,
                workspace,
                files,
            })),
            write_gate: Mutex::new(()),
            store: tokio::sync::RwLock::new(store),
            statuses: Mutex::new(statuses),
            events,
        })))
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.0.config
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.0.snapshot.read().expect("snapshot lock").clone()
    }

    pub fn subscribe(&self) -> broadcast::Receiver<Event> {
        self.0.events.subscribe()
    }

    fn emit(&self, event: Event) {
        // No subscribers is not an error.
        let _ = self.0.events.send(event);
    }

    pub fn index(&self, snap: &Snapshot) -> Vec<DocumentEntry> {
        snap.workspace
            .documents()
            .iter()
            .map(|d| DocumentEntry {
                kind: d.kind(),
                id: d.id().clone(),
                file: snap
                    .file(d.kind(), d.id())
                    .map(|p| display_name(&self.0.config.workspace, p))
                    .unwrap_or_else(|| file_name(d)),
            })
            .collect()
    }

    /// Replaces or creates one document. The new workspace must resolve and
    /// must not add validation errors; otherwise nothing changes.
    pub async fn put_document(
        &self,
        kind: DocumentKind,
        id: Identifier,
        body: PutBody,
        if_match: Option<u64>,
    ) -> Result<WriteOutcome, ApiError> {
        let _gate = self.0.write_gate.lock().await;
        let current = self.snapshot();
        if let Some(expected) = if_match {
            if expected != current.revision {
                return Err(ApiError::conflict(format!(
                    "revision {expected} is stale; the workspace is at revision {}",
                    current.revision
                )));
            }
        }
        let existing = current.file(kind, &id).map(Path::to_path_buf);
        let path = existing
            .clone()
            .unwrap_or_else(|| self.0.config.workspace.join(format!("{id}{}", kind.extension())));
        let shown = display_name(&self.0.config.workspace, &path);

        let text = match body {
            PutBody::Text(t) => t,
            PutBody::Json(v) => {
                let doc = Document::from_json(kind, v).map_err(|e| ApiError::bad_request(format!("invalid {kind} document: {e}")))?;
                serialize_document(&doc)
            }
        };
        let parsed = parse_document(kind, &text, &shown);
        let Some(doc) = parsed.document else {
            return Err(ApiError::invalid(parsed.diagnostics));
        };
        if doc.id() != &id {
            return Err(ApiError::unprocessable(
                "id_mismatch",
                format!("document declares id `{}` but was sent to `{id}`", doc.id()),
            ));
        }
        let canonical = serialize_document(&doc);
        let doc = parse_document(kind, &canonical, &shown)
            .document
            .expect("canonical text parses");

        let mut docs: Vec<Document> = current
            .workspace
            .documents()
            .into_iter()
            .filter(|d| !(d.kind() == kind && d.id() == &id))
            .collect();
        docs.push(doc);
        let workspace = resolve_workspace(docs).map_err(ApiError::invalid)?;
        let lint = &self.0.config.tool.lint;
        let before: BTreeSet<(saf_core::diag::Code, String)> = validate(&current.workspace, lint)
            .into_iter()
            .filter(Diagnostic::is_error)
            .map(|d| (d.code, d.message))
            .collect();
        let mut diagnostics = parsed.diagnostics;
        diagnostics.extend(validate(&workspace, lint));
        let added: Vec<Diagnostic> = diagnostics
            .iter()
            .filter(|d| d.is_error() && !before.contains(&(d.code, d.message.clone())))
            .cloned()
            .collect();
        if !added.is_empty() {
            return Err(ApiError::invalid(added));
        }

        write_atomically(&path, &canonical).map_err(|e| ApiError::internal(format!("cannot write {shown}: {e}")))?;
        let mut files = current.files.clone();
        files.insert((kind, id), path);
        let revision = current.revision + 1;
        *self.0.snapshot.write().expect("snapshot lock") = Arc::new(Snapshot {
            revision,
            workspace,
            files,
        });
        self.emit(Event::Revision { revision });
        sort_diagnostics(&mut diagnostics);
        Ok(WriteOutcome {
            revision,
            created: existing.is_none(),
            diagnostics,
        })
    }

    /// Evaluates one KPI against the current store.
    pub async fn status(&self, kpi: &str, at: DateTime<Utc>) -> Option<KpiStatus> {
        let snap = self.snapshot();
        let spec = snap.workspace.kpi(kpi)?;
        let store = self.0.store.read().await;
        Some(evaluate(spec, store.store(), at))
    }

    /// Appends a batch, re-evaluates the KPIs reading any ingested metric at
    /// `at` and publishes one event per state change.
    pub async fn ingest(&self, lines: &str, strict: bool, at: DateTime<Utc>) -> std::io::Result<IngestOutcome> {
        let snap = self.snapshot();
        let options = IngestOptions {
            strict,
            catalog: MetricCatalog::from_workspace(&snap.workspace),
        };
        let mut store = self.0.store.write().await;
        let report = store.ingest(lines, &options)?;
        let touched = report.metrics();
        let affected: Vec<_> = snap
            .workspace
            .kpis()
            .filter(|k| k.expression.metrics().iter().any(|m| touched.contains(m)))
            .collect();
        let current: Vec<KpiStatus> = affected.iter().map(|k| evaluate(k, store.store(), at)).collect();
        drop(store);

        let mut statuses = self.0.statuses.lock().await;
        let previous: Vec<KpiStatus> = current
            .iter()
            .filter_map(|s| statuses.get(&s.kpi_id).cloned())
            .collect();
        let transitions = detect_transitions(&previous, &current, affected.iter().copied());
        for status in current {
            let from = statuses.get(&status.kpi_id).map_or(KpiState::Unknown, |s| s.state);
            if from != status.state {
                let fired = transitions
                    .iter()
                    .find(|t| t.kpi_id == status.kpi_id)
                    .map(|t| t.fired.clone())
                    .unwrap_or_default();
                self.emit(Event::KpiStatus {
                    status: status.clone(),
                    from,
                    fired,
                });
            }
            statuses.insert(status.kpi_id.clone(), status);
        }
        Ok(IngestOutcome { report, transitions })
    }
}

pub enum PutBody {
    Text(String),
    Json(serde_json::Value),
}

fn write_atomically(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}
