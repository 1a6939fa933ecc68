use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::expr::FitnessExpression;
use crate::diag::Origin;
use crate::model::{EnumError, Identifier};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrganizationalGoal {
    pub id: Identifier,
    pub statement: String,
    /// A sustainability goal declared in some decision map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sustainability_goal_ref: Option<Identifier>,
    #[serde(skip)]
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalSuccessFactor {
    pub id: Identifier,
    pub statement: String,
    pub goal_ref: Identifier,
    #[serde(skip)]
    pub origin: Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Comparator {
    pub const NAMES: &'static [&'static str] = &["<", "<=", ">", ">="];

    pub fn as_str(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        }
    }

    /// Exact comparison, no epsilon.
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Lt => value < threshold,
            Comparator::Le => value <= threshold,
            Comparator::Gt => value > threshold,
            Comparator::Ge => value >= threshold,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Comparator {
    type Err = EnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "<" => Ok(Comparator::Lt),
            "<=" => Ok(Comparator::Le),
            ">" => Ok(Comparator::Gt),
            ">=" => Ok(Comparator::Ge),
            _ => Err(EnumError {
                kind: "comparator",
                value: s.to_string(),
                expected: Self::NAMES,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub comparator: Comparator,
    pub threshold: f64,
    #[serde(default)]
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiSpec {
    pub id: Identifier,
    pub name: String,
    pub csf_ref: Identifier,
    pub expression: FitnessExpression,
    pub target: Target,
    /// Quality requirements this KPI stands for.
    pub concern_refs: Vec<Identifier>,
    /// Actions fired when the KPI goes into `missed`.
    #[serde(default)]
    pub action_refs: Vec<Identifier>,
    #[serde(skip)]
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub id: Identifier,
    pub description: String,
    #[serde(default)]
    pub concern_refs: Vec<Identifier>,
    #[serde(skip)]
    pub origin: Origin,
}

/// Contents of one `.kpi.saf` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiDocument {
    pub id: Identifier,
    #[serde(default)]
    pub goals: Vec<OrganizationalGoal>,
    #[serde(default)]
    pub csfs: Vec<CriticalSuccessFactor>,
    #[serde(default)]
    pub kpis: Vec<KpiSpec>,
    #[serde(default)]
    pub actions: Vec<ActionSpec>,
    #[serde(skip)]
    pub origin: Origin,
}

impl KpiDocument {
    pub fn new(id: Identifier) -> Self {
        Self {
            id,
            goals: Vec::new(),
            csfs: Vec::new(),
            kpis: Vec::new(),
            actions: Vec::new(),
            origin: Origin::default(),
        }
    }
}

/// Canonical ordering: every block list sorted by id, reference lists sorted
/// and deduplicated.
pub fn canonicalize_kpi(doc: &KpiDocument) -> KpiDocument {
    let mut out = doc.clone();
    out.goals.sort_by(|a, b| a.id.cmp(&b.id));
    out.csfs.sort_by(|a, b| a.id.cmp(&b.id));
    for k in &mut out.kpis {
        k.concern_refs.sort();
        k.concern_refs.dedup();
        k.action_refs.sort();
        k.action_refs.dedup();
    }
    out.kpis.sort_by(|a, b| a.id.cmp(&b.id));
    for a in &mut out.actions {
        a.concern_refs.sort();
        a.concern_refs.dedup();
    }
    out.actions.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KpiState {
    Met,
    Missed,
    Unknown,
}

impl fmt::Display for KpiState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KpiState::Met => "met",
            KpiState::Missed => "missed",
            KpiState::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiStatus {
    pub kpi_id: Identifier,
    pub value: Option<f64>,
    pub state: KpiState,
    #[serde(with = "rfc3339")]
    pub as_of: DateTime<Utc>,
    pub inputs_used: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Timestamps on the wire: RFC 3339, UTC, `Z` suffix, sub-second digits only
/// when present.
pub mod rfc3339 {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn format(ts: &DateTime<Utc>) -> String {
        ts.to_rfc3339_opts(SecondsFormat::AutoSi, true)
    }

    pub fn parse(s: &str) -> Result<DateTime<Utc>, chrono::ParseError> {
        DateTime::parse_from_rfc3339(s).map(|t| t.with_timezone(&Utc))
    }

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(ts))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// The JSON text shared by every interface that reports a single status, so
/// the CLI and the service agree byte for byte.
pub fn status_json(status: &KpiStatus) -> String {
    let mut s = serde_json::to_string_pretty(status).expect("status serializes");
    s.push('\n');
    s
}

pub fn statuses_json(statuses: &[KpiStatus]) -> String {
    let mut s = serde_json::to_string_pretty(statuses).expect("statuses serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparator_is_exact() {
        assert!(Comparator::Le.holds(2.0, 2.0));
        assert!(!Comparator::Lt.holds(2.0, 2.0));
        assert!(!Comparator::Le.holds(2.0 + f64::EPSILON * 2.0, 2.0));
        assert!(Comparator::Ge.holds(2.0, 2.0));
        assert!(!Comparator::Gt.holds(2.0, 2.0));
    }

    #[test]
    fn status_wire_shape() {
        let s = KpiStatus {
            kpi_id: Identifier::new("k").unwrap(),
            value: None,
            state: KpiState::Unknown,
            as_of: rfc3339::parse("2024-05-01T12:00:00Z").unwrap(),
            inputs_used: 0,
            note: None,
        };
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"kpi_id": "k", "value": null, "state": "unknown", "as_of": "2024-05-01T12:00:00Z", "inputs_used": 0})
        );
    }
}
