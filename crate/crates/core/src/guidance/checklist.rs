//! Checklist of reflective questions, each backed by a machine-checkable
//! rule over the workspace.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{ConcernKind, Dimension, DocumentKind, EffectType, ImpactLevel, Workspace};

pub const DEFAULT_CHECKLIST: &str = include_str!("../../config/checklist.toml");

/// The rule catalog a checklist item may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckRule {
    /// Every decision map names its system.
    SystemNamed,
    /// At least one quality attribute exists on some decision map.
    MainQasIdentified,
    /// At least one feature exists on some decision map.
    HasFeatures,
    /// Every dimension spanned by a loaded matrix has a decision map concern.
    DimensionCoverage,
    /// Every dimension with a decision map concern also has an SQ entry.
    HasQaPerConsideredDimension,
    /// Every decision map quality attribute has an SQ entry.
    ConcernsInSq,
    /// Concerns exist on all three impact levels.
    AllImpactLevels,
    /// No effect is undecided.
    EffectsDecided,
    /// Every concern has an incident effect.
    NoIsolatedConcerns,
    /// Every feature is the source of an effect.
    FeaturesHaveEffects,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecklistItem {
    pub id: String,
    pub prompt: String,
    pub check: CheckRule,
    pub applies_to: DocumentKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecklistSpec {
    #[serde(default)]
    pub items: Vec<ChecklistItem>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChecklistError {
    #[error("invalid checklist file: {0}")]
    Syntax(String),
    #[error("duplicate checklist item `{0}`")]
    DuplicateItem(String),
}

impl ChecklistSpec {
    pub fn default_checklist() -> Self {
        Self::from_toml(DEFAULT_CHECKLIST).expect("shipped checklist is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, ChecklistError> {
        let spec: Self = toml::from_str(text).map_err(|e| ChecklistError::Syntax(e.to_string()))?;
        let mut seen = BTreeSet::new();
        for item in &spec.items {
            if !seen.insert(item.id.as_str()) {
                return Err(ChecklistError::DuplicateItem(item.id.clone()));
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStatus {
    Satisfied,
    Unsatisfied,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecklistEntry {
    pub item_id: String,
    pub prompt: String,
    pub status: ItemStatus,
    pub evidence: String,
}

fn has_kind(ws: &Workspace, kind: DocumentKind) -> bool {
    match kind {
        DocumentKind::Dm => !ws.decision_maps.is_empty(),
        DocumentKind::Sq => !ws.sq_models.is_empty(),
        DocumentKind::Matrix => !ws.matrices.is_empty(),
        DocumentKind::Kpi => !ws.kpi_documents.is_empty(),
        DocumentKind::Arch => !ws.architectures.is_empty(),
    }
}

fn list<I: IntoIterator<Item = S>, S: ToString>(items: I) -> String {
    items.into_iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

fn verdict(missing: Vec<String>, ok: impl Into<String>, what: &str) -> (ItemStatus, String) {
    if missing.is_empty() {
        (ItemStatus::Satisfied, ok.into())
    } else {
        (ItemStatus::Unsatisfied, format!("{what}: {}", list(missing)))
    }
}

fn run_rule(ws: &Workspace, rule: CheckRule) -> (ItemStatus, String) {
    let concerns = || ws.decision_maps.iter().flat_map(|m| m.concerns.iter());
    let dm_dims: BTreeSet<Dimension> = concerns().map(|c| c.dimension).collect();
    match rule {
        CheckRule::SystemNamed => verdict(
            ws.decision_maps
                .iter()
                .filter(|m| m.system_name.trim().is_empty())
                .map(|m| m.id.to_string())
                .collect(),
            "every decision map names its system",
            "decision maps without a system name",
        ),
        CheckRule::MainQasIdentified => {
            let qas: Vec<String> = concerns()
                .filter(|c| c.kind == ConcernKind::QualityAttribute)
                .map(|c| c.id.to_string())
                .collect();
            if qas.is_empty() {
                (ItemStatus::Unsatisfied, "no quality attribute declared".into())
            } else {
                (ItemStatus::Satisfied, format!("{} quality attribute(s): {}", qas.len(), list(&qas)))
            }
        }
        CheckRule::HasFeatures => {
            let features: Vec<String> = ws
                .decision_maps
                .iter()
                .flat_map(|m| m.features.iter().map(|f| f.id.to_string()))
                .collect();
            if features.is_empty() {
                (ItemStatus::Unsatisfied, "no feature declared".into())
            } else {
                (ItemStatus::Satisfied, format!("feature(s): {}", list(&features)))
            }
        }
        CheckRule::DimensionCoverage => {
            let spanned: BTreeSet<Dimension> =
                ws.matrices.iter().flat_map(|m| [m.row_dimension, m.col_dimension]).collect();
            verdict(
                spanned.difference(&dm_dims).map(|d| d.to_string()).collect(),
                format!("dimensions covered: {}", list(&spanned)),
                "dimensions without a concern",
            )
        }
        CheckRule::HasQaPerConsideredDimension => {
            let sq_dims: BTreeSet<Dimension> = ws
                .sq_models
                .iter()
                .flat_map(|m| m.entries.iter().flat_map(|e| e.dimensions.iter().copied()))
                .collect();
            verdict(
                dm_dims.difference(&sq_dims).map(|d| d.to_string()).collect(),
                format!("SQ model covers: {}", list(&dm_dims)),
                "dimensions without an SQ entry",
            )
        }
        CheckRule::ConcernsInSq => verdict(
            concerns()
                .filter(|c| c.kind == ConcernKind::QualityAttribute && ws.sq_entry(c.id.as_str()).is_none())
                .map(|c| c.id.to_string())
                .collect(),
            "every quality attribute has an SQ entry",
            "quality attributes missing from the SQ model",
        ),
        CheckRule::AllImpactLevels => {
            let levels: BTreeSet<ImpactLevel> = concerns().map(|c| c.impact).collect();
            verdict(
                ImpactLevel::ALL.iter().filter(|l| !levels.contains(l)).map(|l| l.to_string()).collect(),
                "all impact levels have concerns",
                "impact levels without a concern",
            )
        }
        CheckRule::EffectsDecided => verdict(
            ws.decision_maps
                .iter()
                .flat_map(|m| m.effects.iter())
                .filter(|e| e.effect_type == EffectType::Undecided)
                .map(|e| format!("{} -> {}", e.source, e.target))
                .collect(),
            "every effect is positive or negative",
            "undecided effects",
        ),
        CheckRule::NoIsolatedConcerns => verdict(
            ws.decision_maps
                .iter()
                .flat_map(|m| {
                    m.concerns
                        .iter()
                        .filter(|c| {
                            !m.effects
                                .iter()
                                .any(|e| e.target == c.id || (e.source.variant.is_none() && e.source.id == c.id))
                        })
                        .map(|c| c.id.to_string())
                })
                .collect(),
            "every concern takes part in an effect",
            "isolated concerns",
        ),
        CheckRule::FeaturesHaveEffects => verdict(
            ws.decision_maps
                .iter()
                .flat_map(|m| {
                    m.features
                        .iter()
                        .filter(|f| !m.effects.iter().any(|e| e.source.id == f.id))
                        .map(|f| f.id.to_string())
                })
                .collect(),
            "every feature has an effect",
            "features without effects",
        ),
    }
}

/// One entry per checklist item, in checklist order.
pub fn checklist_report(ws: &Workspace, checklist: &ChecklistSpec) -> Vec<ChecklistEntry> {
    checklist
        .items
        .iter()
        .map(|item| {
            let (status, evidence) = if has_kind(ws, item.applies_to) {
                run_rule(ws, item.check)
            } else {
                (
                    ItemStatus::NotApplicable,
                    format!("no {} document loaded", item.applies_to),
                )
            };
            ChecklistEntry {
                item_id: item.id.clone(),
                prompt: item.prompt.clone(),
                status,
                evidence,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_has_ten_items_with_distinct_rules() {
        let c = ChecklistSpec::default_checklist();
        assert_eq!(c.items.len(), 10);
        let rules: BTreeSet<_> = c.items.iter().map(|i| i.check).collect();
        assert_eq!(rules.len(), 10);
    }

    #[test]
    fn empty_workspace_is_not_applicable() {
        let report = checklist_report(&Workspace::default(), &ChecklistSpec::default_checklist());
        assert!(report.iter().all(|e| e.status == ItemStatus::NotApplicable));
    }

    #[test]
    fn duplicate_ids_and_unknown_rules_are_rejected() {
        let dup = "[[items]]\nid = \"a\"\nprompt = \"p\"\ncheck = \"has_features\"\napplies_to = \"dm\"\n";
        assert!(matches!(
            ChecklistSpec::from_toml(&format!("{dup}{dup}")),
            Err(ChecklistError::DuplicateItem(_))
        ));
        let unknown = dup.replace("has_features", "reads_minds");
        assert!(matches!(ChecklistSpec::from_toml(&unknown), Err(ChecklistError::Syntax(_))));
    }
}
