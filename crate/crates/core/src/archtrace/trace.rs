//! Traceability from KPIs to architecture elements and back.
//!
//! Both directions walk the same typed relations:
//! kpi -measures-> metric -quantifies-> concern (when its SQ entry is a
//! decision map concern), kpi -represents-> concern,
//! concern -pertains_to / characterized_by-> decision,
//! decision -represented_by-> feature, feature -realized_by-> element.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diag::{Code, Diagnostic};
use crate::kpi::KpiSpec;
use crate::model::{Identifier, Workspace};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TraceEdge {
    pub from: Identifier,
    pub to: Identifier,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceResult {
    pub kpi_id: Identifier,
    pub metrics: Vec<Identifier>,
    pub concerns: Vec<Identifier>,
    pub decisions: Vec<Identifier>,
    pub features: Vec<Identifier>,
    pub elements: Vec<Identifier>,
    pub edges: Vec<TraceEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementImpact {
    pub element_id: Identifier,
    pub features: Vec<Identifier>,
    pub decisions: Vec<Identifier>,
    pub concerns: Vec<Identifier>,
    pub kpis: Vec<Identifier>,
}

/// Concerns a metric quantifies: the owning SQ entry when it appears on a
/// decision map.
fn quantified_concern(ws: &Workspace, metric: &Identifier) -> Option<Identifier> {
    let (entry, _) = ws.metric(metric.as_str())?;
    ws.is_dm_concern(entry.qa_id.as_str()).then(|| entry.qa_id.clone())
}

fn realizers(ws: &Workspace, feature: &Identifier) -> BTreeSet<Identifier> {
    ws.features_named(feature.as_str()).flat_map(|f| f.realized_by.iter().cloned()).collect()
}

fn kpi_concerns(ws: &Workspace, kpi: &KpiSpec) -> BTreeSet<Identifier> {
    let mut out: BTreeSet<Identifier> = kpi.concern_refs.iter().cloned().collect();
    out.extend(kpi.expression.metrics().iter().filter_map(|m| quantified_concern(ws, m)));
    out
}

fn edge(from: &Identifier, to: &Identifier, relation: &str) -> TraceEdge {
    TraceEdge {
        from: from.clone(),
        to: to.clone(),
        relation: relation.to_string(),
    }
}

pub fn trace_kpi(ws: &Workspace, kpi_id: &str) -> Result<TraceResult, Diagnostic> {
    let kpi = ws
        .kpi(kpi_id)
        .ok_or_else(|| Diagnostic::new(Code::E501, format!("unknown kpi `{kpi_id}`")).on_element(kpi_id))?;
    let mut edges = BTreeSet::new();

    let metrics = kpi.expression.metrics();
    for m in &metrics {
        edges.insert(edge(&kpi.id, m, "measures"));
        if let Some(c) = quantified_concern(ws, m) {
            edges.insert(edge(m, &c, "quantifies"));
        }
    }
    for c in &kpi.concern_refs {
        edges.insert(edge(&kpi.id, c, "represents"));
    }
    let concerns = kpi_concerns(ws, kpi);

    let mut decisions = BTreeSet::new();
    for d in ws.decisions() {
        for c in &d.pertains_to {
            if concerns.contains(c) {
                edges.insert(edge(c, &d.id, "pertains_to"));
                decisions.insert(d.id.clone());
            }
        }
        for c in &d.characterized_by {
            if concerns.contains(c) {
                edges.insert(edge(c, &d.id, "characterized_by"));
                decisions.insert(d.id.clone());
            }
        }
    }

    let mut features = BTreeSet::new();
    for (f, d) in ws.represents() {
        if decisions.contains(d) {
            edges.insert(edge(d, f, "represented_by"));
            features.insert(f.clone());
        }
    }

    let mut elements = BTreeSet::new();
    for f in &features {
        for e in realizers(ws, f) {
            edges.insert(edge(f, &e, "realized_by"));
            elements.insert(e);
        }
    }

    Ok(TraceResult {
        kpi_id: kpi.id.clone(),
        metrics: metrics.into_iter().collect(),
        concerns: concerns.into_iter().collect(),
        decisions: decisions.into_iter().collect(),
        features: features.into_iter().collect(),
        elements: elements.into_iter().collect(),
        edges: edges.into_iter().collect(),
    })
}

pub fn impacts_of_element(ws: &Workspace, element_id: &str) -> Result<ElementImpact, Diagnostic> {
    let element = ws.element(element_id).ok_or_else(|| {
        Diagnostic::new(Code::E501, format!("unknown architecture element `{element_id}`")).on_element(element_id)
    })?;
    let features: BTreeSet<Identifier> = ws
        .decision_maps
        .iter()
        .flat_map(|m| m.features.iter())
        .filter(|f| f.realized_by.contains(&element.id))
        .map(|f| f.id.clone())
        .collect();
    let decisions: BTreeSet<Identifier> = ws
        .represents()
        .iter()
        .filter(|(f, _)| features.contains(*f))
        .map(|(_, d)| d.clone())
        .collect();
    let concerns: BTreeSet<Identifier> = ws
        .decisions()
        .filter(|d| decisions.contains(&d.id))
        .flat_map(|d| d.concerns().cloned())
        .collect();
    let kpis: BTreeSet<Identifier> = ws
        .kpis()
        .filter(|k| !kpi_concerns(ws, k).is_disjoint(&concerns))
        .map(|k| k.id.clone())
        .collect();
    Ok(ElementImpact {
        element_id: element.id.clone(),
        features: features.into_iter().collect(),
        decisions: decisions.into_iter().collect(),
        concerns: concerns.into_iter().collect(),
        kpis: kpis.into_iter().collect(),
    })
}
