use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Dimension, EffectType, Identifier, ImpactLevel, InvalidIdentifier};
use crate::diag::Origin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcernKind {
    QualityAttribute,
    SustainabilityRequirement,
}

impl ConcernKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ConcernKind::QualityAttribute => "qa",
            ConcernKind::SustainabilityRequirement => "requirement",
        }
    }
}

/// A design concern placed in one dimension and on one impact level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concern {
    pub id: Identifier,
    pub name: String,
    pub kind: ConcernKind,
    pub dimension: Dimension,
    pub impact: ImpactLevel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(skip)]
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variant {
    pub id: Identifier,
    pub name: String,
    #[serde(skip)]
    pub origin: Origin,
}

/// An externally observable software property. Features sit outside the
/// time bands and carry no dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub id: Identifier,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub variants: Vec<Variant>,
    /// Architecture elements realizing this feature.
    #[serde(default)]
    pub realized_by: Vec<Identifier>,
    #[serde(skip)]
    pub origin: Origin,
}

impl Feature {
    pub fn variant(&self, id: &str) -> Option<&Variant> {
        self.variants.iter().find(|v| v.id.as_str() == id)
    }
}

/// Source end of an effect: a feature, a feature variant (`feature.variant`)
/// or a concern.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EffectSource {
    pub id: Identifier,
    pub variant: Option<Identifier>,
}

impl EffectSource {
    pub fn node(id: Identifier) -> Self {
        Self { id, variant: None }
    }

    pub fn variant(feature: Identifier, variant: Identifier) -> Self {
        Self {
            id: feature,
            variant: Some(variant),
        }
    }
}

impl fmt::Display for EffectSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.variant {
            Some(v) => write!(f, "{}.{}", self.id, v),
            None => write!(f, "{}", self.id),
        }
    }
}

impl FromStr for EffectSource {
    type Err = InvalidIdentifier;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('.') {
            Some((f, v)) => Ok(Self::variant(f.parse()?, v.parse()?)),
            None => Ok(Self::node(s.parse()?)),
        }
    }
}

impl Serialize for EffectSource {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EffectSource {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Effect {
    pub source: EffectSource,
    pub target: Identifier,
    pub effect_type: EffectType,
    /// Annotation of a measured impact, drawn on the arrow.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impact_label: Option<String>,
    #[serde(skip)]
    pub origin: Origin,
}

impl Effect {
    pub fn key(&self) -> (&EffectSource, &Identifier) {
        (&self.source, &self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SustainabilityGoal {
    pub id: Identifier,
    pub statement: String,
    #[serde(default)]
    pub linked_concerns: Vec<Identifier>,
    #[serde(skip)]
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionMap {
    pub id: Identifier,
    pub title: String,
    pub system_name: String,
    #[serde(default)]
    pub concerns: Vec<Concern>,
    #[serde(default)]
    pub features: Vec<Feature>,
    #[serde(default)]
    pub effects: Vec<Effect>,
    #[serde(default)]
    pub goals: Vec<SustainabilityGoal>,
    /// Free-form tags (concern hierarchies, clusters, stakeholders).
    #[serde(default)]
    pub metadata: BTreeMap<Identifier, String>,
    #[serde(skip)]
    pub origin: Origin,
}

impl DecisionMap {
    pub fn new(id: Identifier, title: impl Into<String>, system_name: impl Into<String>) -> Self {
        Self {
            id,
            title: title.into(),
            system_name: system_name.into(),
            concerns: Vec::new(),
            features: Vec::new(),
            effects: Vec::new(),
            goals: Vec::new(),
            metadata: BTreeMap::new(),
            origin: Origin::default(),
        }
    }

    pub fn concern(&self, id: &str) -> Option<&Concern> {
        self.concerns.iter().find(|c| c.id.as_str() == id)
    }

    pub fn feature(&self, id: &str) -> Option<&Feature> {
        self.features.iter().find(|f| f.id.as_str() == id)
    }

    /// The concern an effect starts from, if its source is a concern.
    pub fn source_concern(&self, effect: &Effect) -> Option<&Concern> {
        if effect.source.variant.is_some() {
            return None;
        }
        self.concern(effect.source.id.as_str())
    }

    pub fn has_effect(&self, source: &str, target: &str) -> bool {
        self.effects.iter().any(|e| {
            e.source.variant.is_none() && e.source.id.as_str() == source && e.target.as_str() == target
        })
    }
}

/// Stable ordering used for diffs and byte-identical serialization.
///
/// Concerns sort by (impact, dimension, id); features, variants and goals by
/// id; effects by (source, target). Reference lists are sorted and
/// deduplicated.
pub fn canonicalize(map: &DecisionMap) -> DecisionMap {
    let mut out = map.clone();
    out.concerns
        .sort_by(|a, b| (a.impact, a.dimension, &a.id).cmp(&(b.impact, b.dimension, &b.id)));
    for feature in &mut out.features {
        feature.variants.sort_by(|a, b| a.id.cmp(&b.id));
        feature.realized_by.sort();
        feature.realized_by.dedup();
    }
    out.features.sort_by(|a, b| a.id.cmp(&b.id));
    out.effects.sort_by(|a, b| a.key().cmp(&b.key()));
    for goal in &mut out.goals {
        goal.linked_concerns.sort();
        goal.linked_concerns.dedup();
    }
    out.goals.sort_by(|a, b| a.id.cmp(&b.id));
    out
}
