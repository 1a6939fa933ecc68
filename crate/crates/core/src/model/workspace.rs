use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{DecisionMap, DependencyMatrix, Feature, Identifier, MetricSpec, SqEntry, SqModel};
use crate::archtrace::{ArchitectureDescription, ArchitectureElement, DesignDecision};
use crate::diag::{sort_diagnostics, Code, Diagnostic, Origin};
use crate::kpi::{ActionSpec, CriticalSuccessFactor, KpiDocument, KpiSpec, OrganizationalGoal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentKind {
    Dm,
    Sq,
    Matrix,
    Kpi,
    Arch,
}

impl DocumentKind {
    pub const ALL: [DocumentKind; 5] = [
        DocumentKind::Dm,
        DocumentKind::Sq,
        DocumentKind::Matrix,
        DocumentKind::Kpi,
        DocumentKind::Arch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DocumentKind::Dm => "dm",
            DocumentKind::Sq => "sq",
            DocumentKind::Matrix => "matrix",
            DocumentKind::Kpi => "kpi",
            DocumentKind::Arch => "arch",
        }
    }

    /// File suffix, including the leading dot.
    pub fn extension(self) -> &'static str {
        match self {
            DocumentKind::Dm => ".dm.saf",
            DocumentKind::Sq => ".sq.csv",
            DocumentKind::Matrix => ".matrix.csv",
            DocumentKind::Kpi => ".kpi.saf",
            DocumentKind::Arch => ".arch.saf",
        }
    }

    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        let name = path.file_name()?.to_str()?;
        Self::ALL.into_iter().find(|k| name.ends_with(k.extension()) && name.len() > k.extension().len())
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for DocumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    DecisionMap(DecisionMap),
    SqModel(SqModel),
    Matrix(DependencyMatrix),
    Kpi(KpiDocument),
    Architecture(ArchitectureDescription),
}

impl Document {
    pub fn kind(&self) -> DocumentKind {
        match self {
            Document::DecisionMap(_) => DocumentKind::Dm,
            Document::SqModel(_) => DocumentKind::Sq,
            Document::Matrix(_) => DocumentKind::Matrix,
            Document::Kpi(_) => DocumentKind::Kpi,
            Document::Architecture(_) => DocumentKind::Arch,
        }
    }

    pub fn id(&self) -> &Identifier {
        match self {
            Document::DecisionMap(d) => &d.id,
            Document::SqModel(d) => &d.id,
            Document::Matrix(d) => &d.id,
            Document::Kpi(d) => &d.id,
            Document::Architecture(d) => &d.id,
        }
    }

    /// The document as JSON, in the shape of its model type.
    pub fn to_json(&self) -> serde_json::Value {
        let v = match self {
            Document::DecisionMap(d) => serde_json::to_value(d),
            Document::SqModel(d) => serde_json::to_value(d),
            Document::Matrix(d) => serde_json::to_value(d),
            Document::Kpi(d) => serde_json::to_value(d),
            Document::Architecture(d) => serde_json::to_value(d),
        };
        v.expect("models serialize to JSON")
    }

    pub fn from_json(kind: DocumentKind, value: serde_json::Value) -> Result<Self, serde_json::Error> {
        Ok(match kind {
            DocumentKind::Dm => Document::DecisionMap(serde_json::from_value(value)?),
            DocumentKind::Sq => Document::SqModel(serde_json::from_value(value)?),
            DocumentKind::Matrix => Document::Matrix(serde_json::from_value(value)?),
            DocumentKind::Kpi => Document::Kpi(serde_json::from_value(value)?),
            DocumentKind::Arch => Document::Architecture(serde_json::from_value(value)?),
        })
    }

    pub fn origin(&self) -> &Origin {
        match self {
            Document::DecisionMap(d) => &d.origin,
            Document::SqModel(d) => &d.origin,
            Document::Matrix(d) => &d.origin,
            Document::Kpi(d) => &d.origin,
            Document::Architecture(d) => &d.origin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConcernSite {
    pub dm: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FeatureSite {
    pub dm: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MetricSite {
    pub model: usize,
    pub entry: usize,
    pub metric: usize,
}

type Slot = (usize, usize);

#[derive(Debug, Clone, Default)]
struct SymbolTable {
    concerns: BTreeMap<Identifier, Vec<ConcernSite>>,
    features: BTreeMap<Identifier, Vec<FeatureSite>>,
    dm_goals: BTreeMap<Identifier, Slot>,
    sq_entries: BTreeMap<Identifier, Slot>,
    metrics: BTreeMap<Identifier, MetricSite>,
    org_goals: BTreeMap<Identifier, Slot>,
    csfs: BTreeMap<Identifier, Slot>,
    kpis: BTreeMap<Identifier, Slot>,
    actions: BTreeMap<Identifier, Slot>,
    elements: BTreeMap<Identifier, Slot>,
    decisions: BTreeMap<Identifier, Slot>,
    represents: BTreeMap<Identifier, Identifier>,
}

/// A set of documents whose cross references all resolve.
///
/// Concern and feature ids may repeat across decision maps and then denote
/// the same logical element. Every other element kind is unique across the
/// workspace.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub decision_maps: Vec<DecisionMap>,
    pub sq_models: Vec<SqModel>,
    pub matrices: Vec<DependencyMatrix>,
    pub kpi_documents: Vec<KpiDocument>,
    pub architectures: Vec<ArchitectureDescription>,
    symbols: SymbolTable,
}

impl Workspace {
    pub fn is_empty(&self) -> bool {
        self.decision_maps.is_empty()
            && self.sq_models.is_empty()
            && self.matrices.is_empty()
            && self.kpi_documents.is_empty()
            && self.architectures.is_empty()
    }

    /// All documents, by kind then id.
    pub fn documents(&self) -> Vec<Document> {
        let mut out: Vec<Document> = Vec::new();
        out.extend(self.decision_maps.iter().cloned().map(Document::DecisionMap));
        out.extend(self.sq_models.iter().cloned().map(Document::SqModel));
        out.extend(self.matrices.iter().cloned().map(Document::Matrix));
        out.extend(self.kpi_documents.iter().cloned().map(Document::Kpi));
        out.extend(self.architectures.iter().cloned().map(Document::Architecture));
        out
    }

    pub fn document(&self, kind: DocumentKind, id: &str) -> Option<Document> {
        match kind {
            DocumentKind::Dm => self.decision_map(id).cloned().map(Document::DecisionMap),
            DocumentKind::Sq => self.sq_models.iter().find(|d| d.id.as_str() == id).cloned().map(Document::SqModel),
            DocumentKind::Matrix => self.matrices.iter().find(|d| d.id.as_str() == id).cloned().map(Document::Matrix),
            DocumentKind::Kpi => self.kpi_documents.iter().find(|d| d.id.as_str() == id).cloned().map(Document::Kpi),
            DocumentKind::Arch => self.architectures.iter().find(|d| d.id.as_str() == id).cloned().map(Document::Architecture),
        }
    }

    pub fn decision_map(&self, id: &str) -> Option<&DecisionMap> {
        self.decision_maps.iter().find(|d| d.id.as_str() == id)
    }

    pub fn concern_ids(&self) -> impl Iterator<Item = &Identifier> {
        self.symbols.concerns.keys()
    }

    pub fn concern_sites(&self, id: &str) -> &[ConcernSite] {
        self.symbols.concerns.get(id).map_or(&[], Vec::as_slice)
    }

    pub fn is_dm_concern(&self, id: &str) -> bool {
        self.symbols.concerns.contains_key(id)
    }

    pub fn features_named(&self, id: &str) -> impl Iterator<Item = &Feature> {
        self.symbols
            .features
            .get(id)
            .into_iter()
            .flatten()
            .map(|s| &self.decision_maps[s.dm].features[s.index])
    }

    pub fn feature_ids(&self) -> impl Iterator<Item = &Identifier> {
        self.symbols.features.keys()
    }

    pub fn sq_entry(&self, qa_id: &str) -> Option<&SqEntry> {
        let (m, e) = *self.symbols.sq_entries.get(qa_id)?;
        Some(&self.sq_models[m].entries[e])
    }

    /// The metric and the SQ entry owning it.
    pub fn metric(&self, id: &str) -> Option<(&SqEntry, &MetricSpec)> {
        let s = self.symbols.metrics.get(id)?;
        let entry = &self.sq_models[s.model].entries[s.entry];
        Some((entry, &entry.metrics[s.metric]))
    }

    pub fn metric_ids(&self) -> BTreeSet<Identifier> {
        self.symbols.metrics.keys().cloned().collect()
    }

    pub fn org_goal(&self, id: &str) -> Option<&OrganizationalGoal> {
        let (d, i) = *self.symbols.org_goals.get(id)?;
        Some(&self.kpi_documents[d].goals[i])
    }

    pub fn csf(&self, id: &str) -> Option<&CriticalSuccessFactor> {
        let (d, i) = *self.symbols.csfs.get(id)?;
        Some(&self.kpi_documents[d].csfs[i])
    }

    pub fn kpi(&self, id: &str) -> Option<&KpiSpec> {
        let (d, i) = *self.symbols.kpis.get(id)?;
        Some(&self.kpi_documents[d].kpis[i])
    }

    /// Every KPI in the workspace, ordered by id.
    pub fn kpis(&self) -> impl Iterator<Item = &KpiSpec> {
        self.symbols
            .kpis
            .values()
            .map(|&(d, i)| &self.kpi_documents[d].kpis[i])
    }

    pub fn action(&self, id: &str) -> Option<&ActionSpec> {
        let (d, i) = *self.symbols.actions.get(id)?;
        Some(&self.kpi_documents[d].actions[i])
    }

    pub fn element(&self, id: &str) -> Option<&ArchitectureElement> {
        let (d, i) = *self.symbols.elements.get(id)?;
        Some(&self.architectures[d].elements[i])
    }

    pub fn elements(&self) -> impl Iterator<Item = &ArchitectureElement> {
        self.symbols
            .elements
            .values()
            .map(|&(d, i)| &self.architectures[d].elements[i])
    }

    pub fn decision(&self, id: &str) -> Option<&DesignDecision> {
        let (d, i) = *self.symbols.decisions.get(id)?;
        Some(&self.architectures[d].decisions[i])
    }

    pub fn decisions(&self) -> impl Iterator<Item = &DesignDecision> {
        self.symbols
            .decisions
            .values()
            .map(|&(d, i)| &self.architectures[d].decisions[i])
    }

    /// Feature id → represented decision id, merged over all architecture
    /// descriptions.
    pub fn represents(&self) -> &BTreeMap<Identifier, Identifier> {
        &self.symbols.represents
    }

    /// Every id referenced from anywhere in the workspace, with the kind of
    /// element it must name.
    pub fn referenced_ids(&self) -> Vec<(&'static str, Identifier)> {
        let mut out = Vec::new();
        for dm in &self.decision_maps {
            for e in &dm.effects {
                out.push(("node", e.source.id.clone()));
                out.push(("node", e.target.clone()));
            }
            for g in &dm.goals {
                out.extend(g.linked_concerns.iter().map(|c| ("concern", c.clone())));
            }
            for f in &dm.features {
                out.extend(f.realized_by.iter().map(|e| ("element", e.clone())));
            }
        }
        for doc in &self.kpi_documents {
            for g in &doc.goals {
                out.extend(g.sustainability_goal_ref.iter().map(|r| ("dm_goal", r.clone())));
            }
            for c in &doc.csfs {
                out.push(("org_goal", c.goal_ref.clone()));
            }
            for k in &doc.kpis {
                out.push(("csf", k.csf_ref.clone()));
                out.extend(k.concern_refs.iter().map(|c| ("concern", c.clone())));
                out.extend(k.action_refs.iter().map(|a| ("action", a.clone())));
                out.extend(k.expression.metrics().into_iter().map(|m| ("metric", m)));
            }
            for a in &doc.actions {
                out.extend(a.concern_refs.iter().map(|c| ("concern", c.clone())));
            }
        }
        for arch in &self.architectures {
            for d in &arch.decisions {
                out.extend(d.concerns().map(|c| ("concern", c.clone())));
            }
            for (f, d) in &arch.represents {
                out.push(("feature", f.clone()));
                out.push(("decision", d.clone()));
            }
        }
        out
    }

    /// Ids declared per element kind, mirroring `referenced_ids`.
    pub fn declared_ids(&self, kind: &str) -> BTreeSet<Identifier> {
        let s = &self.symbols;
        let keys = |m: &BTreeMap<Identifier, Slot>| m.keys().cloned().collect::<BTreeSet<_>>();
        match kind {
            "node" => s.concerns.keys().chain(s.features.keys()).cloned().collect(),
            "concern" => s.concerns.keys().chain(s.sq_entries.keys()).cloned().collect(),
            "feature" => s.features.keys().cloned().collect(),
            "element" => keys(&s.elements),
            "dm_goal" => keys(&s.dm_goals),
            "org_goal" => keys(&s.org_goals),
            "csf" => keys(&s.csfs),
            "action" => keys(&s.actions),
            "metric" => s.metrics.keys().cloned().collect(),
            "decision" => keys(&s.decisions),
            _ => BTreeSet::new(),
        }
    }
}

/// Binds every cross-document reference.
///
/// Returns the complete workspace, or every resolution error found (never a
/// partial workspace).
pub fn resolve_workspace(documents: Vec<Document>) -> Result<Workspace, Vec<Diagnostic>> {
    let mut ws = Workspace::default();
    for doc in documents {
        match doc {
            Document::DecisionMap(d) => ws.decision_maps.push(d),
            Document::SqModel(d) => ws.sq_models.push(d),
            Document::Matrix(d) => ws.matrices.push(d),
            Document::Kpi(d) => ws.kpi_documents.push(d),
            Document::Architecture(d) => ws.architectures.push(d),
        }
    }
    ws.decision_maps.sort_by(|a, b| a.id.cmp(&b.id));
    ws.sq_models.sort_by(|a, b| a.id.cmp(&b.id));
    ws.matrices.sort_by(|a, b| a.id.cmp(&b.id));
    ws.kpi_documents.sort_by(|a, b| a.id.cmp(&b.id));
    ws.architectures.sort_by(|a, b| a.id.cmp(&b.id));

    let mut r = Resolver::default();
    r.declare(&mut ws);
    r.check_references(&ws);
    if r.diags.is_empty() {
        Ok(ws)
    } else {
        sort_diagnostics(&mut r.diags);
        Err(r.diags)
    }
}

#[derive(Default)]
struct Resolver {
    diags: Vec<Diagnostic>,
}

impl Resolver {
    fn duplicate(&mut self, what: &str, id: &Identifier, origin: &Origin) {
        self.diags.push(
            Diagnostic::new(Code::E002, format!("duplicate {what} `{id}`"))
                .at_origin(origin)
                .on_element(id.as_str()),
        );
    }

    fn unresolved(&mut self, what: &str, id: &Identifier, from: &str, origin: &Origin) {
        self.diags.push(
            Diagnostic::new(Code::E001, format!("unresolved {what} `{id}` referenced by {from}"))
                .at_origin(origin)
                .on_element(id.as_str())
                .with_related([id.to_string()]),
        );
    }

    fn unique_docs<'a, I>(&mut self, kind: DocumentKind, docs: I)
    where
        I: IntoIterator<Item = (&'a Identifier, &'a Origin)>,
    {
        let mut seen = BTreeSet::new();
        for (id, origin) in docs {
            if !seen.insert(id) {
                self.duplicate(&format!("{kind} document"), id, origin);
            }
        }
    }

    fn declare_slot(
        &mut self,
        map: &mut BTreeMap<Identifier, Slot>,
        what: &str,
        id: &Identifier,
        slot: Slot,
        origin: &Origin,
    ) {
        if map.contains_key(id) {
            self.duplicate(what, id, origin);
        } else {
            map.insert(id.clone(), slot);
        }
    }

    fn declare(&mut self, ws: &mut Workspace) {
        let mut t = SymbolTable::default();

        self.unique_docs(DocumentKind::Dm, ws.decision_maps.iter().map(|d| (&d.id, &d.origin)));
        for (di, dm) in ws.decision_maps.iter().enumerate() {
            let mut nodes = BTreeSet::new();
            for (ci, c) in dm.concerns.iter().enumerate() {
                if !nodes.insert(&c.id) {
                    self.duplicate("concern or feature", &c.id, &c.origin);
                    continue;
                }
                t.concerns.entry(c.id.clone()).or_default().push(ConcernSite { dm: di, index: ci });
            }
            for (fi, f) in dm.features.iter().enumerate() {
                if !nodes.insert(&f.id) {
                    self.duplicate("concern or feature", &f.id, &f.origin);
                    continue;
                }
                let mut variants = BTreeSet::new();
                for v in &f.variants {
                    if !variants.insert(&v.id) {
                        self.duplicate(&format!("variant of feature `{}`", f.id), &v.id, &v.origin);
                    }
                }
                t.features.entry(f.id.clone()).or_default().push(FeatureSite { dm: di, index: fi });
            }
            for (gi, g) in dm.goals.iter().enumerate() {
                self.declare_slot(&mut t.dm_goals, "sustainability goal", &g.id, (di, gi), &g.origin);
            }
        }

        self.unique_docs(DocumentKind::Sq, ws.sq_models.iter().map(|d| (&d.id, &d.origin)));
        for (mi, model) in ws.sq_models.iter().enumerate() {
            for (ei, entry) in model.entries.iter().enumerate() {
                if entry.dimensions.is_empty() {
                    self.diags.push(
                        Diagnostic::new(
                            Code::E003,
                            format!("SQ entry `{}` has no sustainability dimension", entry.qa_id),
                        )
                        .at_origin(&entry.origin)
                        .on_element(entry.qa_id.as_str()),
                    );
                }
                self.declare_slot(&mut t.sq_entries, "quality attribute", &entry.qa_id, (mi, ei), &entry.origin);
                for (xi, metric) in entry.metrics.iter().enumerate() {
                    if t.metrics.contains_key(&metric.id) {
                        self.duplicate("metric", &metric.id, &entry.origin);
                    } else {
                        t.metrics.insert(
                            metric.id.clone(),
                            MetricSite {
                                model: mi,
                                entry: ei,
                                metric: xi,
                            },
                        );
                    }
                }
            }
        }

        self.unique_docs(DocumentKind::Matrix, ws.matrices.iter().map(|d| (&d.id, &d.origin)));
        for m in &ws.matrices {
            let mut rows = BTreeSet::new();
            for r in &m.rows {
                if !rows.insert(r) {
                    self.duplicate(&format!("row of matrix `{}`", m.id), r, &m.origin);
                }
            }
            let mut cols = BTreeSet::new();
            for c in &m.cols {
                if !cols.insert(c) {
                    self.duplicate(&format!("column of matrix `{}`", m.id), c, &m.origin);
                }
            }
        }

        self.unique_docs(DocumentKind::Kpi, ws.kpi_documents.iter().map(|d| (&d.id, &d.origin)));
        for (di, doc) in ws.kpi_documents.iter().enumerate() {
            for (i, g) in doc.goals.iter().enumerate() {
                self.declare_slot(&mut t.org_goals, "organizational goal", &g.id, (di, i), &g.origin);
            }
            for (i, c) in doc.csfs.iter().enumerate() {
                self.declare_slot(&mut t.csfs, "critical success factor", &c.id, (di, i), &c.origin);
            }
            for (i, k) in doc.kpis.iter().enumerate() {
                self.declare_slot(&mut t.kpis, "kpi", &k.id, (di, i), &k.origin);
            }
            for (i, a) in doc.actions.iter().enumerate() {
                self.declare_slot(&mut t.actions, "action", &a.id, (di, i), &a.origin);
            }
        }

        self.unique_docs(DocumentKind::Arch, ws.architectures.iter().map(|d| (&d.id, &d.origin)));
        for (di, arch) in ws.architectures.iter().enumerate() {
            for (i, e) in arch.elements.iter().enumerate() {
                self.declare_slot(&mut t.elements, "architecture element", &e.id, (di, i), &e.origin);
            }
            for (i, d) in arch.decisions.iter().enumerate() {
                self.declare_slot(&mut t.decisions, "design decision", &d.id, (di, i), &d.origin);
                if let Some(chosen) = d.chosen {
                    if chosen >= d.options.len() {
                        self.diags.push(
                            Diagnostic::new(
                                Code::E102,
                                format!(
                                    "decision `{}` chooses option {chosen} but has {} option(s)",
                                    d.id,
                                    d.options.len()
                                ),
                            )
                            .at_origin(&d.origin)
                            .on_element(d.id.as_str()),
                        );
                    }
                }
            }
            for (f, d) in &arch.represents {
                if t.represents.contains_key(f) {
                    let origin = arch.represents_origins.get(f).unwrap_or(&arch.origin);
                    self.duplicate("represents entry for feature", f, origin);
                } else {
                    t.represents.insert(f.clone(), d.clone());
                }
            }
        }
        ws.symbols = t;
    }

    fn check_references(&mut self, ws: &Workspace) {
        let t = &ws.symbols;
        let is_concern = |id: &Identifier| t.concerns.contains_key(id) || t.sq_entries.contains_key(id);

        for dm in &ws.decision_maps {
            let mut effect_keys = BTreeSet::new();
            for e in &dm.effects {
                let from = format!("an effect in decision map `{}`", dm.id);
                match &e.source.variant {
                    Some(v) => match dm.feature(e.source.id.as_str()) {
                        Some(f) if f.variant(v.as_str()).is_some() => {}
                        Some(_) => self.unresolved("variant", v, &from, &e.origin),
                        None => self.unresolved("feature", &e.source.id, &from, &e.origin),
                    },
                    None => {
                        if dm.concern(e.source.id.as_str()).is_none() && dm.feature(e.source.id.as_str()).is_none() {
                            self.unresolved("effect source", &e.source.id, &from, &e.origin);
                        }
                    }
                }
                if dm.concern(e.target.as_str()).is_none() && dm.feature(e.target.as_str()).is_none() {
                    self.unresolved("concern", &e.target, &from, &e.origin);
                }
                if e.source.variant.is_none() && e.source.id == e.target {
                    self.diags.push(
                        Diagnostic::new(Code::E005, format!("effect on `{}` points at itself", e.target))
                            .at_origin(&e.origin)
                            .on_element(e.target.as_str()),
                    );
                }
                if !effect_keys.insert(e.key()) {
                    self.diags.push(
                        Diagnostic::new(
                            Code::E002,
                            format!("duplicate effect `{} -> {}`", e.source, e.target),
                        )
                        .at_origin(&e.origin)
                        .on_element(e.target.as_str()),
                    );
                }
            }
            for g in &dm.goals {
                for c in &g.linked_concerns {
                    if dm.concern(c.as_str()).is_none() {
                        self.unresolved("concern", c, &format!("goal `{}`", g.id), &g.origin);
                    }
                }
            }
            for f in &dm.features {
                for el in &f.realized_by {
                    if !t.elements.contains_key(el) {
                        self.unresolved("architecture element", el, &format!("feature `{}`", f.id), &f.origin);
                    }
                }
            }
        }

        for doc in &ws.kpi_documents {
            for g in &doc.goals {
                if let Some(r) = &g.sustainability_goal_ref {
                    if !t.dm_goals.contains_key(r) {
                        self.unresolved("sustainability goal", r, &format!("goal `{}`", g.id), &g.origin);
                    }
                }
            }
            for c in &doc.csfs {
                if !t.org_goals.contains_key(&c.goal_ref) {
                    self.unresolved("organizational goal", &c.goal_ref, &format!("csf `{}`", c.id), &c.origin);
                }
            }
            for k in &doc.kpis {
                let from = format!("kpi `{}`", k.id);
                if !t.csfs.contains_key(&k.csf_ref) {
                    self.unresolved("critical success factor", &k.csf_ref, &from, &k.origin);
                }
                if k.concern_refs.is_empty() {
                    self.diags.push(
                        Diagnostic::new(Code::E001, format!("kpi `{}` represents no concern", k.id))
                            .at_origin(&k.origin)
                            .on_element(k.id.as_str()),
                    );
                }
                for c in &k.concern_refs {
                    if !is_concern(c) {
                        self.unresolved("concern", c, &from, &k.origin);
                    }
                }
                for a in &k.action_refs {
                    if !t.actions.contains_key(a) {
                        self.unresolved("action", a, &from, &k.origin);
                    }
                }
                for m in k.expression.metrics() {
                    if !t.metrics.contains_key(&m) {
                        self.diags.push(
                            Diagnostic::new(
                                Code::E401,
                                format!("kpi `{}` aggregates unknown metric `{m}`", k.id),
                            )
                            .at_origin(&k.origin)
                            .on_element(m.as_str())
                            .with_related([k.id.to_string()]),
                        );
                    }
                }
            }
            for a in &doc.actions {
                for c in &a.concern_refs {
                    if !is_concern(c) {
                        self.unresolved("concern", c, &format!("action `{}`", a.id), &a.origin);
                    }
                }
            }
        }

        for arch in &ws.architectures {
            for d in &arch.decisions {
                for c in d.concerns() {
                    if !is_concern(c) {
                        self.unresolved("concern", c, &format!("decision `{}`", d.id), &d.origin);
                    }
                }
            }
            for (f, d) in &arch.represents {
                let origin = arch.represents_origins.get(f).unwrap_or(&arch.origin);
                if !t.features.contains_key(f) {
                    self.unresolved("feature", f, "a represents entry", origin);
                }
                if !t.decisions.contains_key(d) {
                    self.unresolved("design decision", d, "a represents entry", origin);
                }
            }
        }
    }
}
