use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diag::{Origin, OriginMap};
use crate::model::Identifier;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    SoftwareService,
    Component,
    Other(String),
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementKind::SoftwareService => f.write_str("software_service"),
            ElementKind::Component => f.write_str("component"),
            ElementKind::Other(label) => write!(f, "other({label})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchitectureElement {
    pub id: Identifier,
    pub name: String,
    pub kind: ElementKind,
    #[serde(skip)]
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignDecision {
    pub id: Identifier,
    pub statement: String,
    /// Alternatives considered.
    #[serde(default)]
    pub options: Vec<String>,
    /// Index into `options`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chosen: Option<usize>,
    #[serde(default)]
    pub pertains_to: Vec<Identifier>,
    /// QAs characterizing the chosen option.
    #[serde(default)]
    pub characterized_by: Vec<Identifier>,
    #[serde(skip)]
    pub origin: Origin,
}

impl DesignDecision {
    pub fn concerns(&self) -> impl Iterator<Item = &Identifier> {
        self.pertains_to.iter().chain(&self.characterized_by)
    }

    pub fn chosen_option(&self) -> Option<&str> {
        self.chosen.and_then(|i| self.options.get(i)).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchitectureDescription {
    pub id: Identifier,
    #[serde(default)]
    pub elements: Vec<ArchitectureElement>,
    #[serde(default)]
    pub decisions: Vec<DesignDecision>,
    /// Feature id → the design decision it represents.
    #[serde(default)]
    pub represents: BTreeMap<Identifier, Identifier>,
    #[serde(skip)]
    pub represents_origins: OriginMap<Identifier>,
    #[serde(skip)]
    pub origin: Origin,
}

impl ArchitectureDescription {
    pub fn new(id: Identifier) -> Self {
        Self {
            id,
            elements: Vec::new(),
            decisions: Vec::new(),
            represents: BTreeMap::new(),
            represents_origins: OriginMap::default(),
            origin: Origin::default(),
        }
    }

    pub fn element(&self, id: &str) -> Option<&ArchitectureElement> {
        self.elements.iter().find(|e| e.id.as_str() == id)
    }

    pub fn decision(&self, id: &str) -> Option<&DesignDecision> {
        self.decisions.iter().find(|d| d.id.as_str() == id)
    }
}

/// Elements and decisions sorted by id, reference lists sorted and
/// deduplicated. Option order is meaningful (`chosen` indexes it) and kept.
pub fn canonicalize_arch(doc: &ArchitectureDescription) -> ArchitectureDescription {
    let mut out = doc.clone();
    out.elements.sort_by(|a, b| a.id.cmp(&b.id));
    for d in &mut out.decisions {
        d.pertains_to.sort();
        d.pertains_to.dedup();
        d.characterized_by.sort();
        d.characterized_by.dedup();
    }
    out.decisions.sort_by(|a, b| a.id.cmp(&b.id));
    out
}
