//! Shared helpers for the integration tests: fixture paths, seeded model
//! generators and independent reference implementations.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use saf_core::archtrace::{ArchitectureDescription, ArchitectureElement, DesignDecision, ElementKind};
use saf_core::diag::{Origin, OriginMap};
use saf_core::kpi::{
    ActionSpec, Aggregator, BinaryOp, Comparator, CriticalSuccessFactor, Expr, FitnessExpression, KpiDocument,
    KpiSpec, OrganizationalGoal, Target, TimeUnit, Window,
};
use saf_core::model::{
    Concern, ConcernKind, DecisionMap, DependencyMatrix, DependencyValue, Dimension, Document, Effect,
    EffectSource, EffectType, Feature, Identifier, ImpactLevel, MetricKind, MetricSpec, SqEntry, SqModel,
    SustainabilityGoal, Variant, Workspace,
};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"))
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn id(s: &str) -> Identifier {
    Identifier::new(s).unwrap()
}

pub const DIMENSIONS: [Dimension; 4] = [
    Dimension::Technical,
    Dimension::Economic,
    Dimension::Social,
    Dimension::Environmental,
];
pub const IMPACTS: [ImpactLevel; 3] = [ImpactLevel::Immediate, ImpactLevel::Enabling, ImpactLevel::Systemic];
pub const EFFECTS: [EffectType; 3] = [EffectType::Positive, EffectType::Negative, EffectType::Undecided];
pub const CELLS: [DependencyValue; 3] = [DependencyValue::Plus, DependencyValue::Minus, DependencyValue::Indeterminate];

/// Hands out fresh identifiers. Every id ends in a unique number, so ids never
/// collide with each other or with a keyword.
#[derive(Default)]
pub struct Ids(usize);

impl Ids {
    pub fn next(&mut self, rng: &mut StdRng) -> Identifier {
        const HEAD: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
        const TAIL: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_-";
        let mut s = String::new();
        s.push(*HEAD.choose(rng).unwrap() as char);
        for _ in 0..rng.gen_range(0..8) {
            s.push(*TAIL.choose(rng).unwrap() as char);
        }
        self.0 += 1;
        s.push_str(&self.0.to_string());
        Identifier::new(s).unwrap()
    }
}

/// Free text drawn from a pool heavy in characters that need escaping.
pub fn text(rng: &mut StdRng) -> String {
    const POOL: &[char] = &[
        'a', 'b', 'z', 'Q', '0', '9', ' ', ' ', '"', '\\', '\n', '\t', ',', ';', ':', '|', '#', '{', '}', '(', ')',
        '<', '>', '&', '\'', '-', 'é', '→', '€', '✓',
    ];
    let len = rng.gen_range(1..16);
    let mut s: String = (0..len).map(|_| *POOL.choose(rng).unwrap()).collect();
    // Never blank: a leading letter keeps every field non-empty.
    s.insert(0, 'x');
    s
}

fn maybe<T>(rng: &mut StdRng, p: f64, f: impl FnOnce(&mut StdRng) -> T) -> Option<T> {
    rng.gen_bool(p).then(|| f(rng))
}

fn pick<'a, T>(rng: &mut StdRng, items: &'a [T]) -> &'a T {
    items.choose(rng).unwrap()
}

fn subset<T: Clone>(rng: &mut StdRng, items: &[T], max: usize) -> Vec<T> {
    let n = rng.gen_range(0..=max.min(items.len()));
    items.choose_multiple(rng, n).cloned().collect()
}

pub struct DmShape {
    pub concerns: usize,
    pub features: usize,
    pub effects: usize,
}

pub fn gen_dm_with(rng: &mut StdRng, ids: &mut Ids, shape: DmShape, elements: &[Identifier]) -> DecisionMap {
    let mut dm = DecisionMap::new(ids.next(rng), text(rng), text(rng));
    for _ in 0..rng.gen_range(0..3) {
        dm.metadata.insert(ids.next(rng), text(rng));
    }
    let kinds = [ConcernKind::QualityAttribute, ConcernKind::SustainabilityRequirement];
    for _ in 0..shape.concerns {
        dm.concerns.push(Concern {
            id: ids.next(rng),
            name: text(rng),
            kind: *pick(rng, &kinds),
            dimension: *pick(rng, &DIMENSIONS),
            impact: *pick(rng, &IMPACTS),
            description: maybe(rng, 0.3, text),
            origin: Origin::default(),
        });
    }
    for _ in 0..shape.features {
        let variants = (0..rng.gen_range(0..3))
            .map(|_| Variant {
                id: ids.next(rng),
                name: text(rng),
                origin: Origin::default(),
            })
            .collect();
        dm.features.push(Feature {
            id: ids.next(rng),
            name: text(rng),
            description: maybe(rng, 0.3, text),
            variants,
            realized_by: subset(rng, elements, 2),
            origin: Origin::default(),
        });
    }
    let concern_ids: Vec<Identifier> = dm.concerns.iter().map(|c| c.id.clone()).collect();
    let mut sources: Vec<EffectSource> = concern_ids.iter().cloned().map(EffectSource::node).collect();
    for f in &dm.features {
        sources.push(EffectSource::node(f.id.clone()));
        for v in &f.variants {
            sources.push(EffectSource::variant(f.id.clone(), v.id.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    if !concern_ids.is_empty() {
        for _ in 0..shape.effects * 3 {
            if dm.effects.len() == shape.effects {
                break;
            }
            let source = pick(rng, &sources).clone();
            let target = pick(rng, &concern_ids).clone();
            if source.variant.is_none() && source.id == target {
                continue;
            }
            if !seen.insert((source.to_string(), target.clone())) {
                continue;
            }
            dm.effects.push(Effect {
                source,
                target,
                effect_type: *pick(rng, &EFFECTS),
                impact_label: maybe(rng, 0.2, text),
                origin: Origin::default(),
            });
        }
    }
    for _ in 0..rng.gen_range(0..3) {
        dm.goals.push(SustainabilityGoal {
            id: ids.next(rng),
            statement: text(rng),
            linked_concerns: subset(rng, &concern_ids, 3),
            origin: Origin::default(),
        });
    }
    dm
}

pub fn gen_dm(rng: &mut StdRng) -> DecisionMap {
    let shape = DmShape {
        concerns: rng.gen_range(0..10),
        features: rng.gen_range(0..5),
        effects: rng.gen_range(0..15),
    };
    let mut ids = Ids::default();
    let elements: Vec<Identifier> = (0..3).map(|_| ids.next(rng)).collect();
    gen_dm_with(rng, &mut ids, shape, &elements)
}

fn gen_metric(rng: &mut StdRng, ids: &mut Ids) -> MetricSpec {
    let id = ids.next(rng);
    let kinds = [MetricKind::Internal, MetricKind::External, MetricKind::QualityInUse];
    let units = ["kWh", "s", "EUR", "", "%", " padded ", "a:b", "x;y", "q\"uote", "ms/req"];
    MetricSpec {
        name: if rng.gen_bool(0.5) { id.to_string() } else { text(rng) },
        id,
        metric_kind: *pick(rng, &kinds),
        unit: pick(rng, &units).to_string(),
        description: maybe(rng, 0.5, text),
    }
}

pub fn gen_sq_for(rng: &mut StdRng, ids: &mut Ids, qas: &[Identifier]) -> SqModel {
    let mut sq = SqModel::new(ids.next(rng));
    for qa in qas {
        let mut dims = BTreeSet::new();
        for _ in 0..rng.gen_range(1..3) {
            dims.insert(*pick(rng, &DIMENSIONS));
        }
        sq.entries.push(SqEntry {
            qa_id: qa.clone(),
            name: text(rng),
            definition: text(rng),
            source_ref: text(rng),
            dimensions: dims,
            metrics: (0..rng.gen_range(0..3)).map(|_| gen_metric(rng, ids)).collect(),
            origin: Origin::default(),
        });
    }
    sq
}

pub fn gen_sq(rng: &mut StdRng) -> SqModel {
    let mut ids = Ids::default();
    let qas: Vec<Identifier> = (0..rng.gen_range(0..8)).map(|_| ids.next(rng)).collect();
    gen_sq_for(rng, &mut ids, &qas)
}

/// A matrix over two distinct dimensions whose rows and columns are drawn
/// from `rows` and `cols`, with a random subset of cells filled.
pub fn gen_matrix_over(
    rng: &mut StdRng,
    id: Identifier,
    dims: (Dimension, Dimension),
    rows: &[Identifier],
    cols: &[Identifier],
) -> DependencyMatrix {
    let mut m = DependencyMatrix::new(id, dims.0, dims.1).unwrap();
    m.rows = rows.to_vec();
    m.cols = cols.to_vec();
    for r in rows {
        for c in cols {
            if r != c && rng.gen_bool(0.5) {
                m.cells.insert((r.clone(), c.clone()), *pick(rng, &CELLS));
            }
        }
    }
    m
}

pub fn gen_matrix(rng: &mut StdRng) -> DependencyMatrix {
    let mut ids = Ids::default();
    let mut dims = DIMENSIONS.to_vec();
    dims.shuffle(rng);
    let rows: Vec<Identifier> = (0..rng.gen_range(0..6)).map(|_| ids.next(rng)).collect();
    let cols: Vec<Identifier> = (0..rng.gen_range(0..6)).map(|_| ids.next(rng)).collect();
    let id = ids.next(rng);
    // A matrix without rows still needs a column header line to be written.
    let cols = if rows.is_empty() { Vec::new() } else { cols };
    gen_matrix_over(rng, id, (dims[0], dims[1]), &rows, &cols)
}

pub fn gen_expr(rng: &mut StdRng, metrics: &[Identifier], depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        if metrics.is_empty() || rng.gen_bool(0.3) {
            return Expr::Number(gen_number(rng));
        }
        return Expr::Aggregate {
            agg: *pick(rng, &Aggregator::ALL),
            metric: pick(rng, metrics).clone(),
            window: gen_window(rng),
        };
    }
    if rng.gen_bool(0.15) {
        // A minus before a bare literal folds into the literal when parsed,
        // so negation only wraps compound operands.
        let inner = gen_expr(rng, metrics, depth - 1);
        if matches!(inner, Expr::Number(_)) {
            return inner;
        }
        return Expr::Neg(Box::new(inner));
    }
    let ops = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div];
    Expr::Binary {
        op: *pick(rng, &ops),
        lhs: Box::new(gen_expr(rng, metrics, depth - 1)),
        rhs: Box::new(gen_expr(rng, metrics, depth - 1)),
    }
}

pub fn gen_number(rng: &mut StdRng) -> f64 {
    match rng.gen_range(0..4) {
        0 => f64::from(rng.gen_range(-100..100)),
        1 => rng.gen_range(-1e6..1e6),
        2 => rng.gen_range(0.0..1.0),
        _ => rng.gen::<f64>() * 10f64.powi(rng.gen_range(-20..20)),
    }
}

pub fn gen_window(rng: &mut StdRng) -> Window {
    let units = [TimeUnit::Seconds, TimeUnit::Minutes, TimeUnit::Hours, TimeUnit::Days, TimeUnit::Weeks];
    if rng.gen_bool(0.2) {
        Window::All
    } else {
        Window::Span {
            amount: rng.gen_range(1..1000),
            unit: *pick(rng, &units),
        }
    }
}

pub fn gen_kpi_for(
    rng: &mut StdRng,
    ids: &mut Ids,
    concerns: &[Identifier],
    metrics: &[Identifier],
    dm_goals: &[Identifier],
) -> KpiDocument {
    let mut doc = KpiDocument::new(ids.next(rng));
    for _ in 0..rng.gen_range(1..3) {
        doc.goals.push(OrganizationalGoal {
            id: ids.next(rng),
            statement: text(rng),
            sustainability_goal_ref: if dm_goals.is_empty() { None } else { maybe(rng, 0.5, |r| pick(r, dm_goals).clone()) },
            origin: Origin::default(),
        });
    }
    let goal_ids: Vec<Identifier> = doc.goals.iter().map(|g| g.id.clone()).collect();
    for _ in 0..rng.gen_range(1..3) {
        doc.csfs.push(CriticalSuccessFactor {
            id: ids.next(rng),
            statement: text(rng),
            goal_ref: pick(rng, &goal_ids).clone(),
            origin: Origin::default(),
        });
    }
    let csf_ids: Vec<Identifier> = doc.csfs.iter().map(|c| c.id.clone()).collect();
    for _ in 0..rng.gen_range(0..3) {
        doc.actions.push(ActionSpec {
            id: ids.next(rng),
            description: text(rng),
            concern_refs: subset(rng, concerns, 2),
            origin: Origin::default(),
        });
    }
    let action_ids: Vec<Identifier> = doc.actions.iter().map(|a| a.id.clone()).collect();
    let comparators = [Comparator::Lt, Comparator::Le, Comparator::Gt, Comparator::Ge];
    let units = ["", "kWh", "EUR per day", "q\"x"];
    for _ in 0..rng.gen_range(0..4) {
        let mut concern_refs = subset(rng, concerns, 3);
        if concern_refs.is_empty() && !concerns.is_empty() {
            concern_refs.push(pick(rng, concerns).clone());
        }
        doc.kpis.push(KpiSpec {
            id: ids.next(rng),
            name: text(rng),
            csf_ref: pick(rng, &csf_ids).clone(),
            expression: FitnessExpression {
                root: gen_expr(rng, metrics, 3),
            },
            target: Target {
                comparator: *pick(rng, &comparators),
                threshold: gen_number(rng),
                unit: pick(rng, &units).to_string(),
            },
            concern_refs,
            action_refs: subset(rng, &action_ids, 2),
            origin: Origin::default(),
        });
    }
    doc
}

pub fn gen_kpi(rng: &mut StdRng) -> KpiDocument {
    let mut ids = Ids::default();
    let concerns: Vec<Identifier> = (0..4).map(|_| ids.next(rng)).collect();
    let metrics: Vec<Identifier> = (0..3).map(|_| ids.next(rng)).collect();
    gen_kpi_for(rng, &mut ids, &concerns, &metrics, &[])
}

pub fn gen_arch_for(
    rng: &mut StdRng,
    ids: &mut Ids,
    elements: &[Identifier],
    concerns: &[Identifier],
    features: &[Identifier],
) -> ArchitectureDescription {
    let mut doc = ArchitectureDescription::new(ids.next(rng));
    for e in elements {
        let kind = match rng.gen_range(0..3) {
            0 => ElementKind::SoftwareService,
            1 => ElementKind::Component,
            _ => ElementKind::Other(text(rng)),
        };
        doc.elements.push(ArchitectureElement {
            id: e.clone(),
            name: text(rng),
            kind,
            origin: Origin::default(),
        });
    }
    for _ in 0..rng.gen_range(0..5) {
        let options: Vec<String> = (0..rng.gen_range(0..4)).map(|_| text(rng)).collect();
        let chosen = if options.is_empty() { None } else { maybe(rng, 0.7, |r| r.gen_range(0..options.len())) };
        doc.decisions.push(DesignDecision {
            id: ids.next(rng),
            statement: text(rng),
            options,
            chosen,
            pertains_to: subset(rng, concerns, 2),
            characterized_by: subset(rng, concerns, 3),
            origin: Origin::default(),
        });
    }
    let decision_ids: Vec<Identifier> = doc.decisions.iter().map(|d| d.id.clone()).collect();
    if !decision_ids.is_empty() {
        for f in features {
            if rng.gen_bool(0.6) {
                doc.represents.insert(f.clone(), pick(rng, &decision_ids).clone());
            }
        }
    }
    doc.represents_origins = OriginMap::default();
    doc
}

pub fn gen_arch(rng: &mut StdRng) -> ArchitectureDescription {
    let mut ids = Ids::default();
    let elements: Vec<Identifier> = (0..rng.gen_range(0..5)).map(|_| ids.next(rng)).collect();
    let concerns: Vec<Identifier> = (0..4).map(|_| ids.next(rng)).collect();
    let features: Vec<Identifier> = (0..3).map(|_| ids.next(rng)).collect();
    gen_arch_for(rng, &mut ids, &elements, &concerns, &features)
}

/// A random document of the given kind.
pub fn gen_document(rng: &mut StdRng, kind: usize) -> Document {
    match kind % 5 {
        0 => Document::DecisionMap(gen_dm(rng)),
        1 => Document::SqModel(gen_sq(rng)),
        2 => Document::Matrix(gen_matrix(rng)),
        3 => Document::Kpi(gen_kpi(rng)),
        _ => Document::Architecture(gen_arch(rng)),
    }
}

/// A coherent workspace of one decision map, SQ model, KPI document and
/// architecture whose references all resolve. `size` bounds the number of
/// concerns, features and elements together.
pub fn gen_workspace_docs(rng: &mut StdRng, size: usize) -> Vec<Document> {
    let mut ids = Ids::default();
    let size = size.max(3);
    let n_elements = rng.gen_range(1..=size / 3);
    let n_features = rng.gen_range(1..=size / 3);
    let n_concerns = rng.gen_range(1..=(size - n_elements - n_features).max(1));
    let elements: Vec<Identifier> = (0..n_elements).map(|_| ids.next(rng)).collect();
    let shape = DmShape {
        concerns: n_concerns,
        features: n_features,
        effects: rng.gen_range(0..2 * size),
    };
    let dm = gen_dm_with(rng, &mut ids, shape, &elements);
    let concerns: Vec<Identifier> = dm.concerns.iter().map(|c| c.id.clone()).collect();
    let features: Vec<Identifier> = dm.features.iter().map(|f| f.id.clone()).collect();
    // Some SQ entries name QAs that are not on the map.
    let mut qas = subset(rng, &concerns, concerns.len());
    qas.extend((0..rng.gen_range(0..3)).map(|_| ids.next(rng)));
    let sq = gen_sq_for(rng, &mut ids, &qas);
    let metrics: Vec<Identifier> = sq.entries.iter().flat_map(|e| e.metrics.iter().map(|m| m.id.clone())).collect();
    let mut all_concerns = concerns.clone();
    all_concerns.extend(qas.iter().cloned());
    all_concerns.sort();
    all_concerns.dedup();
    let dm_goals: Vec<Identifier> = dm.goals.iter().map(|g| g.id.clone()).collect();
    let mut kpi = gen_kpi_for(rng, &mut ids, &all_concerns, &metrics, &dm_goals);
    if kpi.kpis.is_empty() {
        let extra = gen_kpi_for(rng, &mut ids, &all_concerns, &metrics, &dm_goals);
        kpi.kpis.extend(extra.kpis.into_iter().map(|mut k| {
            k.csf_ref = kpi.csfs[0].id.clone();
            k.action_refs.clear();
            k
        }));
    }
    let arch = gen_arch_for(rng, &mut ids, &elements, &all_concerns, &features);
    vec![
        Document::DecisionMap(dm),
        Document::SqModel(sq),
        Document::Kpi(kpi),
        Document::Architecture(arch),
    ]
}

/// Reference trace: a breadth-first search over an explicit typed graph.
pub mod trace_oracle {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
    pub enum Node {
        Kpi(String),
        Metric(String),
        Concern(String),
        Decision(String),
        Feature(String),
        Element(String),
    }

    pub fn graph(ws: &Workspace) -> BTreeMap<Node, BTreeSet<Node>> {
        let mut g: BTreeMap<Node, BTreeSet<Node>> = BTreeMap::new();
        let mut add = |a: Node, b: Node| {
            g.entry(a).or_default().insert(b);
        };
        let dm_concerns: BTreeSet<String> = ws
            .decision_maps
            .iter()
            .flat_map(|d| d.concerns.iter().map(|c| c.id.to_string()))
            .collect();
        for doc in &ws.kpi_documents {
            for k in &doc.kpis {
                let mut ms = Vec::new();
                k.expression.root.visit_aggregates(&mut |_, m, _| ms.push(m.to_string()));
                for m in ms {
                    add(Node::Kpi(k.id.to_string()), Node::Metric(m));
                }
                for c in &k.concern_refs {
                    add(Node::Kpi(k.id.to_string()), Node::Concern(c.to_string()));
                }
            }
        }
        for sq in &ws.sq_models {
            for e in &sq.entries {
                if dm_concerns.contains(e.qa_id.as_str()) {
                    for m in &e.metrics {
                        add(Node::Metric(m.id.to_string()), Node::Concern(e.qa_id.to_string()));
                    }
                }
            }
        }
        for arch in &ws.architectures {
            for d in &arch.decisions {
                for c in d.pertains_to.iter().chain(&d.characterized_by) {
                    add(Node::Concern(c.to_string()), Node::Decision(d.id.to_string()));
                }
            }
            for (f, d) in &arch.represents {
                add(Node::Decision(d.to_string()), Node::Feature(f.to_string()));
            }
        }
        for dm in &ws.decision_maps {
            for f in &dm.features {
                for e in &f.realized_by {
                    add(Node::Feature(f.id.to_string()), Node::Element(e.to_string()));
                }
            }
        }
        g
    }

    pub fn reachable(g: &BTreeMap<Node, BTreeSet<Node>>, start: Node) -> BTreeSet<Node> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            if !seen.insert(n.clone()) {
                continue;
            }
            if let Some(next) = g.get(&n) {
                queue.extend(next.iter().cloned());
            }
        }
        seen
    }

    /// Reachable ids split by type: metrics, concerns, decisions, features, elements.
    pub fn trace(ws: &Workspace, kpi: &str) -> [Vec<String>; 5] {
        let g = graph(ws);
        let mut out: [Vec<String>; 5] = Default::default();
        for n in reachable(&g, Node::Kpi(kpi.to_string())) {
            match n {
                Node::Metric(s) => out[0].push(s),
                Node::Concern(s) => out[1].push(s),
                Node::Decision(s) => out[2].push(s),
                Node::Feature(s) => out[3].push(s),
                Node::Element(s) => out[4].push(s),
                Node::Kpi(_) => {}
            }
        }
        out
    }
}

/// Reference consistency check: for every effect and every matrix, look the
/// pair up by brute force in both grid coordinates.
pub mod consistency_oracle {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
    pub struct Finding {
        pub code: &'static str,
        pub source: String,
        pub target: String,
    }

    fn lookup(m: &DependencyMatrix, row: &str, col: &str) -> Option<DependencyValue> {
        let r = m.rows.iter().position(|x| x.as_str() == row)?;
        let c = m.cols.iter().position(|x| x.as_str() == col)?;
        m.cells.get(&(m.rows[r].clone(), m.cols[c].clone())).copied()
    }

    pub fn findings(dm: &DecisionMap, matrices: &[DependencyMatrix]) -> Vec<Finding> {
        let mut out = Vec::new();
        for e in &dm.effects {
            if e.source.variant.is_some() || dm.concern(e.source.id.as_str()).is_none() {
                continue;
            }
            for m in matrices {
                let Some(cell) = lookup(m, e.source.id.as_str(), e.target.as_str()) else {
                    continue;
                };
                let code = match (e.effect_type, cell) {
                    (EffectType::Positive, DependencyValue::Minus) | (EffectType::Negative, DependencyValue::Plus) => {
                        "W101"
                    }
                    (EffectType::Undecided, DependencyValue::Plus | DependencyValue::Minus) => "I201",
                    (EffectType::Positive | EffectType::Negative, DependencyValue::Indeterminate) => "I202",
                    _ => continue,
                };
                out.push(Finding {
                    code,
                    source: e.source.id.to_string(),
                    target: e.target.to_string(),
                });
            }
        }
        out.sort();
        out
    }
}

/// A (map, matrix) pair where matrix rows and columns are drawn from the
/// map's concerns split by dimension, plus a few ids foreign to the map.
pub fn gen_dm_and_matrix(rng: &mut StdRng) -> (DecisionMap, DependencyMatrix) {
    let mut ids = Ids::default();
    let shape = DmShape {
        concerns: rng.gen_range(2..12),
        features: rng.gen_range(0..3),
        effects: rng.gen_range(1..25),
    };
    let dm = gen_dm_with(rng, &mut ids, shape, &[]);
    let mut dims = DIMENSIONS.to_vec();
    dims.shuffle(rng);
    let of = |d: Dimension| -> Vec<Identifier> {
        dm.concerns.iter().filter(|c| c.dimension == d).map(|c| c.id.clone()).collect()
    };
    let mut rows = of(dims[0]);
    let mut cols = of(dims[1]);
    // Mix in concerns regardless of their declared dimension so that both
    // orientations of an effect can land in the grid.
    for c in subset(rng, &dm.concerns.iter().map(|c| c.id.clone()).collect::<Vec<_>>(), 4) {
        if !rows.contains(&c) && !cols.contains(&c) {
            if rng.gen_bool(0.5) {
                rows.push(c);
            } else {
                cols.push(c);
            }
        }
    }
    rows.push(ids.next(rng));
    rows.shuffle(rng);
    cols.shuffle(rng);
    let mid = ids.next(rng);
    let m = gen_matrix_over(rng, mid, (dims[0], dims[1]), &rows, &cols);
    (dm, m)
}
