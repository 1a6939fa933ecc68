use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Dimension, Identifier, MetricKind};
use crate::diag::{Code, Diagnostic, Origin};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub id: Identifier,
    pub name: String,
    pub metric_kind: MetricKind,
    pub unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// One row of the SQ model template.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqEntry {
    pub qa_id: Identifier,
    pub name: String,
    pub definition: String,
    pub source_ref: String,
    pub dimensions: BTreeSet<Dimension>,
    #[serde(default)]
    pub metrics: Vec<MetricSpec>,
    #[serde(skip)]
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqModel {
    pub id: Identifier,
    #[serde(default)]
    pub entries: Vec<SqEntry>,
    #[serde(skip)]
    pub origin: Origin,
}

impl SqModel {
    pub fn new(id: Identifier) -> Self {
        Self {
            id,
            entries: Vec::new(),
            origin: Origin::default(),
        }
    }

    pub fn entry(&self, qa_id: &str) -> Option<&SqEntry> {
        self.entries.iter().find(|e| e.qa_id.as_str() == qa_id)
    }

    pub fn metrics(&self) -> impl Iterator<Item = (&SqEntry, &MetricSpec)> {
        self.entries
            .iter()
            .flat_map(|e| e.metrics.iter().map(move |m| (e, m)))
    }

    /// Duplicate qa ids and metric ids within this model, as E002 diagnostics.
    pub fn duplicate_diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut seen_qa = BTreeSet::new();
        let mut seen_metric = BTreeSet::new();
        for entry in &self.entries {
            if !seen_qa.insert(&entry.qa_id) {
                out.push(
                    Diagnostic::new(
                        Code::E002,
                        format!("duplicate quality attribute `{}` in SQ model `{}`", entry.qa_id, self.id),
                    )
                    .at_origin(&entry.origin)
                    .on_element(entry.qa_id.as_str()),
                );
            }
            for metric in &entry.metrics {
                if !seen_metric.insert(&metric.id) {
                    out.push(
                        Diagnostic::new(
                            Code::E002,
                            format!("duplicate metric `{}` in SQ model `{}`", metric.id, self.id),
                        )
                        .at_origin(&entry.origin)
                        .on_element(metric.id.as_str()),
                    );
                }
            }
        }
        out
    }
}

/// Specializes a generic SQ model with a project model.
///
/// Project entries replace generic entries with the same qa id wholesale;
/// everything else is a union. Generic order is kept, with new project
/// entries appended in project order. The merged model takes the project id.
pub fn merge_sq(generic: &SqModel, project: &SqModel) -> Result<SqModel, Vec<Diagnostic>> {
    let dups = project.duplicate_diagnostics();
    if !dups.is_empty() {
        return Err(dups);
    }
    let overrides: BTreeMap<&Identifier, &SqEntry> =
        project.entries.iter().map(|e| (&e.qa_id, e)).collect();
    let mut entries: Vec<SqEntry> = generic
        .entries
        .iter()
        .map(|g| overrides.get(&g.qa_id).map_or(g, |p| *p).clone())
        .collect();
    let generic_ids: BTreeSet<&Identifier> = generic.entries.iter().map(|e| &e.qa_id).collect();
    entries.extend(
        project
            .entries
            .iter()
            .filter(|p| !generic_ids.contains(&p.qa_id))
            .cloned(),
    );
    let merged = SqModel {
        id: project.id.clone(),
        entries,
        origin: project.origin.clone(),
    };
    let dups = merged.duplicate_diagnostics();
    if dups.is_empty() {
        Ok(merged)
    } else {
        Err(dups)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Identifier {
        Identifier::new(s).unwrap()
    }

    fn entry(qa: &str, definition: &str) -> SqEntry {
        SqEntry {
            qa_id: id(qa),
            name: qa.to_uppercase(),
            definition: definition.into(),
            source_ref: "src".into(),
            dimensions: [Dimension::Technical].into_iter().collect(),
            metrics: vec![],
            origin: Origin::default(),
        }
    }

    fn model(name: &str, entries: Vec<SqEntry>) -> SqModel {
        SqModel {
            id: id(name),
            entries,
            origin: Origin::default(),
        }
    }

    #[test]
    fn project_definition_overrides_generic() {
        let g = model("generic", vec![entry("execution_time", "generic definition")]);
        let p = model(
            "project",
            vec![entry("execution_time", "the time it takes to execute the predefined tests")],
        );
        let m = merge_sq(&g, &p).unwrap();
        assert_eq!(m.entries.len(), 1);
        assert_eq!(m.entries[0].definition, "the time it takes to execute the predefined tests");
    }

    #[test]
    fn empty_generic_is_identity() {
        let g = model("generic", vec![]);
        let p = model("project", vec![entry("energy_efficiency", "d")]);
        assert_eq!(merge_sq(&g, &p).unwrap(), p);
    }

    #[test]
    fn duplicate_project_ids_rejected() {
        let g = model("generic", vec![]);
        let p = model("project", vec![entry("a", "1"), entry("a", "2")]);
        let err = merge_sq(&g, &p).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].code, Code::E002);
    }

    /// Key-wise map union with right bias, by brute force over every pair of
    /// subsets of a four-key universe.
    #[test]
    fn exhaustive_right_biased_union() {
        let universe = ["a", "b", "c", "d"];
        for gmask in 0u32..16 {
            for pmask in 0u32..16 {
                let g_entries: Vec<_> = (0..4)
                    .filter(|i| gmask & (1 << i) != 0)
                    .map(|i| entry(universe[i], "generic"))
                    .collect();
                let p_entries: Vec<_> = (0..4)
                    .filter(|i| pmask & (1 << i) != 0)
                    .map(|i| entry(universe[i], "project"))
                    .collect();
                let merged = merge_sq(&model("g", g_entries), &model("p", p_entries)).unwrap();
                let got: BTreeMap<String, String> = merged
                    .entries
                    .iter()
                    .map(|e| (e.qa_id.to_string(), e.definition.clone()))
                    .collect();
                let mut expected = BTreeMap::new();
                for (i, qa) in universe.iter().enumerate() {
                    if gmask & (1 << i) != 0 {
                        expected.insert(qa.to_string(), "generic".to_string());
                    }
                }
                for (i, qa) in universe.iter().enumerate() {
                    if pmask & (1 << i) != 0 {
                        expected.insert(qa.to_string(), "project".to_string());
                    }
                }
                assert_eq!(got, expected, "g={gmask:04b} p={pmask:04b}");
                assert_eq!(merged.entries.len(), expected.len());
            }
        }
    }

    /// Associative on disjoint key sets, right biased on collisions, checked
    /// over all triples of subsets of a four-key universe.
    #[test]
    fn exhaustive_associativity() {
        let universe = ["a", "b", "c", "d"];
        let build = |mask: u32, tag: &str| -> SqModel {
            model(
                tag,
                (0..4)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| entry(universe[i], tag))
                    .collect(),
            )
        };
        let as_map = |m: &SqModel| -> BTreeMap<String, String> {
            m.entries
                .iter()
                .map(|e| (e.qa_id.to_string(), e.definition.clone()))
                .collect()
        };
        for a in 0u32..16 {
            for b in 0u32..16 {
                for c in 0u32..16 {
                    let (ma, mb, mc) = (build(a, "x"), build(b, "y"), build(c, "z"));
                    let left = merge_sq(&merge_sq(&ma, &mb).unwrap(), &mc).unwrap();
                    let right = merge_sq(&ma, &merge_sq(&mb, &mc).unwrap()).unwrap();
                    assert_eq!(as_map(&left), as_map(&right));
                    if a & b == 0 && b & c == 0 && a & c == 0 {
                        assert_eq!(left.entries.len(), (a | b | c).count_ones() as usize);
                    }
                }
            }
        }
    }
}
