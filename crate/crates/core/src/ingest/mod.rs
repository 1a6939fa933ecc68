//! Measure ingestion: JSONL batches into an append-only, time-indexed store.

mod persist;

use std::collections::{BTreeMap, HashSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::kpi::{rfc3339, Window};
use crate::model::{Identifier, Workspace};

pub use persist::{load_store, LoadWarning, PersistentStore, StoreError, MEASURES_FILE};

/// One raw, timestamped measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureRecord {
    pub run_id: String,
    #[serde(with = "rfc3339")]
    pub timestamp: DateTime<Utc>,
    pub metric: Identifier,
    pub value: f64,
    #[serde(default)]
    pub unit: String,
    /// The architecture element the measure was taken on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<Identifier>,
}

impl MeasureRecord {
    pub fn key(&self) -> DedupKey {
        (self.run_id.clone(), self.metric.clone(), self.timestamp)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }
}

pub type DedupKey = (String, Identifier, DateTime<Utc>);

/// Append-only log with a per-metric time index.
#[derive(Debug, Clone, Default)]
pub struct MeasureStore {
    log: Vec<MeasureRecord>,
    /// Log positions per metric, ordered by (timestamp, position).
    index: BTreeMap<Identifier, Vec<usize>>,
    keys: HashSet<DedupKey>,
}

impl PartialEq for MeasureStore {
    fn eq(&self, other: &Self) -> bool {
        self.log == other.log
    }
}

impl MeasureStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log.is_empty()
    }

    /// Records in arrival order.
    pub fn records(&self) -> &[MeasureRecord] {
        &self.log
    }

    pub fn record(&self, position: usize) -> &MeasureRecord {
        &self.log[position]
    }

    pub fn contains_key(&self, key: &DedupKey) -> bool {
        self.keys.contains(key)
    }

    /// Appends a record unless its dedup key is already present.
    pub fn insert(&mut self, record: MeasureRecord) -> bool {
        if !self.keys.insert(record.key()) {
            return false;
        }
        let pos = self.log.len();
        let positions = self.index.entry(record.metric.clone()).or_default();
        let ts = record.timestamp;
        let log = &self.log;
        // Equal timestamps keep arrival order.
        let at = positions.partition_point(|&p| log[p].timestamp <= ts);
        positions.insert(at, pos);
        self.log.push(record);
        true
    }

    /// Log positions of `metric` with timestamp in `(as_of - window, as_of]`,
    /// ascending by time.
    pub fn window_positions(&self, metric: &str, window: Window, as_of: DateTime<Utc>) -> &[usize] {
        let Some(positions) = self.index.get(metric) else {
            return &[];
        };
        let end = positions.partition_point(|&p| self.log[p].timestamp <= as_of);
        let start = match window.duration().and_then(|d| as_of.checked_sub_signed(d)) {
            Some(lower) => positions[..end].partition_point(|&p| self.log[p].timestamp <= lower),
            None => 0,
        };
        &positions[start..end]
    }

    /// Records of `metric` in `(as_of - window, as_of]`, ascending by time.
    pub fn query(&self, metric: &str, window: Window, as_of: DateTime<Utc>) -> Vec<&MeasureRecord> {
        self.window_positions(metric, window, as_of)
            .iter()
            .map(|&p| &self.log[p])
            .collect()
    }

    pub fn metrics(&self) -> impl Iterator<Item = &Identifier> {
        self.index.keys()
    }

    /// Validates a batch without changing the store.
    pub fn plan_batch(&self, lines: &str, options: &IngestOptions) -> IngestReport {
        let mut report = IngestReport::default();
        let mut batch_keys = HashSet::new();
        for (n, line) in lines.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() {
                continue;
            }
            let record: MeasureRecord = match serde_json::from_str(line) {
                Ok(r) => r,
                Err(e) => {
                    report.reject(line_no, RejectReason::Malformed, Some(e.to_string()));
                    continue;
                }
            };
            if !record.value.is_finite() {
                report.reject(line_no, RejectReason::Malformed, Some("value is not finite".into()));
                continue;
            }
            if record.run_id.is_empty() {
                report.reject(line_no, RejectReason::Malformed, Some("run_id is empty".into()));
                continue;
            }
            let key = record.key();
            if self.keys.contains(&key) || batch_keys.contains(&key) {
                report.reject(line_no, RejectReason::Duplicate, None);
                continue;
            }
            match options.catalog.get(record.metric.as_str()) {
                None if options.strict => {
                    report.reject(
                        line_no,
                        RejectReason::UnknownMetric,
                        Some(format!("metric `{}` is not declared in any SQ model", record.metric)),
                    );
                    continue;
                }
                None => report.note(
                    line_no,
                    format!("metric `{}` is not declared in any SQ model", record.metric),
                ),
                Some(unit) if *unit != record.unit => report.note(
                    line_no,
                    format!(
                        "unit `{}` differs from the declared unit `{unit}` of metric `{}`; not converted",
                        record.unit, record.metric
                    ),
                ),
                Some(_) => {}
            }
            batch_keys.insert(key);
            report.records.push(record);
        }
        report.accepted = report.records.len();
        report
    }

    /// Appends the records of a planned batch.
    pub fn commit(&mut self, report: &IngestReport) {
        for r in &report.records {
            self.insert(r.clone());
        }
    }

    pub fn ingest_batch(&mut self, lines: &str, options: &IngestOptions) -> IngestReport {
        let report = self.plan_batch(lines, options);
        self.commit(&report);
        report
    }
}

/// Declared metrics and their units, used for strict-mode checks and unit
/// notes.
#[derive(Debug, Clone, Default)]
pub struct MetricCatalog(BTreeMap<Identifier, String>);

impl MetricCatalog {
    pub fn from_workspace(ws: &Workspace) -> Self {
        let mut map = BTreeMap::new();
        for model in &ws.sq_models {
            for (_, m) in model.metrics() {
                map.insert(m.id.clone(), m.unit.clone());
            }
        }
        Self(map)
    }

    pub fn insert(&mut self, metric: Identifier, unit: impl Into<String>) {
        self.0.insert(metric, unit.into());
    }

    pub fn get(&self, metric: &str) -> Option<&String> {
        self.0.get(metric)
    }
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub strict: bool,
    pub catalog: MetricCatalog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Duplicate,
    UnknownMetric,
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    /// 1-based line number in the batch.
    pub line: usize,
    pub reason: RejectReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestNote {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejected: Vec<Rejection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<IngestNote>,
    /// The accepted records, in batch order.
    #[serde(skip)]
    pub records: Vec<MeasureRecord>,
}

impl IngestReport {
    fn reject(&mut self, line: usize, reason: RejectReason, detail: Option<String>) {
        self.rejected.push(Rejection { line, reason, detail });
    }

    fn note(&mut self, line: usize, message: String) {
        self.notes.push(IngestNote { line, message });
    }

    pub fn has_malformed(&self) -> bool {
        self.rejected.iter().any(|r| r.reason == RejectReason::Malformed)
    }

    /// Distinct metrics of the accepted records.
    pub fn metrics(&self) -> std::collections::BTreeSet<&Identifier> {
        self.records.iter().map(|r| &r.metric).collect()
    }
}
