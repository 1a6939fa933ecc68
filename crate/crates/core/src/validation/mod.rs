//! Rule engine over a resolved workspace: structural errors, dependency
//! matrix consistency warnings and style lints.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diag::{sort_diagnostics, Code, Diagnostic, Severity};
use crate::model::{DecisionMap, DependencyMatrix, DependencyValue, Effect, Workspace};

/// Lint toggles. Disabling a code removes exactly that code's diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LintConfig {
    #[serde(default)]
    pub disabled: BTreeSet<Code>,
}

impl LintConfig {
    /// Reads `disabled = ["W103", ...]` from TOML text.
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn disable(mut self, code: Code) -> Self {
        self.disabled.insert(code);
        self
    }

    pub fn enabled(&self, code: Code) -> bool {
        !self.disabled.contains(&code)
    }
}

/// The concern-to-concern reading of an effect: its source when that source
/// is a concern of the same map (variant sources never are).
fn concern_source<'a>(map: &'a DecisionMap, effect: &'a Effect) -> Option<&'a str> {
    map.source_concern(effect).map(|c| c.id.as_str())
}

/// All diagnostics for the workspace, sorted by (file, line, code).
pub fn validate(ws: &Workspace, config: &LintConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for map in &ws.decision_maps {
        check_map(map, &ws.matrices, &mut out);
    }
    for model in &ws.sq_models {
        for entry in &model.entries {
            if entry.dimensions.is_empty() {
                out.push(
                    Diagnostic::new(Code::E003, format!("SQ entry `{}` has no dimension", entry.qa_id))
                        .at_origin(&entry.origin)
                        .on_element(entry.qa_id.as_str()),
                );
            } else if entry.dimensions.len() > 1 {
                let dims: Vec<&str> = entry.dimensions.iter().map(|d| d.as_str()).collect();
                out.push(
                    Diagnostic::new(
                        Code::I203,
                        format!("SQ entry `{}` spans {} dimensions: {}", entry.qa_id, dims.len(), dims.join(", ")),
                    )
                    .at_origin(&entry.origin)
                    .on_element(entry.qa_id.as_str()),
                );
            }
        }
    }
    out.retain(|d| config.enabled(d.code));
    sort_diagnostics(&mut out);
    out
}

fn check_map(map: &DecisionMap, matrices: &[DependencyMatrix], out: &mut Vec<Diagnostic>) {
    for effect in &map.effects {
        let target = effect.target.as_str();
        if map.concern(target).is_none() && map.feature(target).is_some() {
            out.push(
                Diagnostic::new(
                    Code::E004,
                    format!("effect `{} -> {target}` targets a feature; effects must end on a concern", effect.source),
                )
                .at_origin(&effect.origin)
                .on_element(target)
                .with_related([effect.source.to_string(), target.to_string()]),
            );
            continue;
        }
        let Some(source) = concern_source(map, effect) else {
            continue;
        };
        if let (Some(s), Some(t)) = (map.concern(source), map.concern(target)) {
            if s.impact > t.impact {
                out.push(
                    Diagnostic::new(
                        Code::W102,
                        format!(
                            "effect `{source} -> {target}` flows from {} back to the earlier level {}",
                            s.impact, t.impact
                        ),
                    )
                    .at_origin(&effect.origin)
                    .with_related([source, target]),
                );
            }
        }
        for matrix in matrices {
            let Some(cell) = matrix.cell(source, target) else {
                continue;
            };
            let ty = effect.effect_type;
            let related = [source.to_string(), target.to_string(), matrix.id.to_string()];
            if ty.is_decided() && cell.contradicts(ty) {
                out.push(
                    Diagnostic::new(
                        Code::W101,
                        format!(
                            "effect `{source} -> {target}` is {ty} but matrix `{}` records `{cell}` for ({source}, {target})",
                            matrix.id
                        ),
                    )
                    .at_origin(&effect.origin)
                    .with_related(related),
                );
            } else if !ty.is_decided() && cell != DependencyValue::Indeterminate {
                out.push(
                    Diagnostic::new(
                        Code::I201,
                        format!(
                            "undecided effect `{source} -> {target}` could be resolved as {} from matrix `{}`",
                            cell.suggested_effect(),
                            matrix.id
                        ),
                    )
                    .at_origin(&effect.origin)
                    .with_related(related),
                );
            } else if ty.is_decided() && cell == DependencyValue::Indeterminate {
                out.push(
                    Diagnostic::new(
                        Code::I202,
                        format!(
                            "effect `{source} -> {target}` is {ty} while matrix `{}` marks the dependency as context dependent",
                            matrix.id
                        ),
                    )
                    .at_origin(&effect.origin)
                    .with_related(related),
                );
            }
        }
    }

    let mut touched: BTreeSet<&str> = BTreeSet::new();
    for e in &map.effects {
        touched.insert(e.source.id.as_str());
        touched.insert(e.target.as_str());
    }
    for c in &map.concerns {
        if !touched.contains(c.id.as_str()) {
            out.push(
                Diagnostic::new(Code::W103, format!("concern `{}` has no incoming or outgoing effect", c.id))
                    .at_origin(&c.origin)
                    .on_element(c.id.as_str()),
            );
        }
    }
    for f in &map.features {
        if !touched.contains(f.id.as_str()) {
            out.push(
                Diagnostic::new(Code::W103, format!("feature `{}` has no effect", f.id))
                    .at_origin(&f.origin)
                    .on_element(f.id.as_str()),
            );
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencySummary {
    /// W101 count.
    pub conflicts: usize,
    /// I201 count.
    pub hints: usize,
    /// I202 count.
    pub context_notes: usize,
    /// Fraction of concern-to-concern effects that have a matrix cell in
    /// row-to-column orientation. Zero when there are no such effects.
    pub coverage: f64,
}

pub fn consistency_summary(ws: &Workspace) -> ConsistencySummary {
    let diags = validate(ws, &LintConfig::default());
    let count = |code| diags.iter().filter(|d| d.code == code).count();
    let mut pairs = 0usize;
    let mut covered = 0usize;
    for map in &ws.decision_maps {
        for e in &map.effects {
            let Some(source) = concern_source(map, e) else {
                continue;
            };
            if map.concern(e.target.as_str()).is_none() {
                continue;
            }
            pairs += 1;
            if ws.matrices.iter().any(|m| m.cell(source, e.target.as_str()).is_some()) {
                covered += 1;
            }
        }
    }
    ConsistencySummary {
        conflicts: count(Code::W101),
        hints: count(Code::I201),
        context_notes: count(Code::I202),
        coverage: if pairs == 0 { 0.0 } else { covered as f64 / pairs as f64 },
    }
}

/// Exit status for a diagnostic list: 2 on errors, 1 on warnings when
/// `strict`, otherwise 0.
pub fn exit_code(diags: &[Diagnostic], strict: bool) -> i32 {
    if diags.iter().any(|d| d.severity() == Severity::Error) {
        2
    } else if strict && diags.iter().any(|d| d.severity() == Severity::Warning) {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_dm, parse_matrix_file};
    use crate::model::{resolve_workspace, Document};

    fn workspace(dm: &str, matrices: &[&str]) -> Workspace {
        let mut docs = vec![Document::DecisionMap(parse_dm(dm, "t.dm.saf").document.unwrap())];
        for (i, m) in matrices.iter().enumerate() {
            let r = parse_matrix_file(m, &format!("m{i}.matrix.csv"));
            docs.push(Document::Matrix(r.document.unwrap()));
        }
        resolve_workspace(docs).unwrap()
    }

    const CONFLICT: &str = r#"decision_map c "C" system "S" {
  qa interoperability "Interoperability" dimension technical impact immediate
  qa modifiability "Modifiability" dimension environmental impact enabling
  effect interoperability -> modifiability positive
}"#;
    const TECH_ENV: &str = "# dims: technical x environmental\n,interoperability,modifiability\ninteroperability,,-\n";

    #[test]
    fn sign_conflict_is_one_w101_naming_both() {
        let ws = workspace(CONFLICT, &[TECH_ENV]);
        let diags = validate(&ws, &LintConfig::default());
        let w101: Vec<_> = diags.iter().filter(|d| d.code == Code::W101).collect();
        assert_eq!(w101.len(), 1);
        assert!(w101[0].related.contains(&"interoperability".to_string()));
        assert!(w101[0].related.contains(&"modifiability".to_string()));
        assert_eq!(exit_code(&diags, false), 0);
        assert_eq!(exit_code(&diags, true), 1);
    }

    #[test]
    fn reverse_orientation_is_silent() {
        let reversed = "# dims: environmental x technical\n,interoperability\nmodifiability,-\n";
        let ws = workspace(CONFLICT, &[reversed]);
        assert!(validate(&ws, &LintConfig::default()).is_empty());
    }

    #[test]
    fn downward_flow_and_isolation() {
        let dm = r#"decision_map d "D" system "S" {
  feature f "F"
  qa a "A" dimension social impact systemic
  qa b "B" dimension social impact immediate
  qa lonely "L" dimension social impact immediate
  effect a -> b undecided
}"#;
        let ws = workspace(dm, &[]);
        let codes: Vec<Code> = validate(&ws, &LintConfig::default()).iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::W103, Code::W103, Code::W102]);
        let quiet = LintConfig::default().disable(Code::W103);
        let codes: Vec<Code> = validate(&ws, &quiet).iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::W102]);
    }

    #[test]
    fn feature_target_is_e004() {
        let dm = r#"decision_map d "D" system "S" {
  feature f "F"
  qa a "A" dimension social impact enabling
  effect a -> f positive
}"#;
        let ws = workspace(dm, &[]);
        let diags = validate(&ws, &LintConfig::default());
        assert!(diags.iter().any(|d| d.code == Code::E004));
        assert_eq!(exit_code(&diags, false), 2);
    }

    #[test]
    fn no_matrices_summary() {
        let ws = workspace(CONFLICT, &[]);
        let s = consistency_summary(&ws);
        assert_eq!((s.conflicts, s.hints), (0, 0));
        assert_eq!(s.coverage, 0.0);
    }

    #[test]
    fn full_coverage_from_own_effects() {
        let agreeing = "# dims: technical x environmental\n,modifiability\ninteroperability,+\n";
        let s = consistency_summary(&workspace(CONFLICT, &[agreeing]));
        assert_eq!(s.conflicts, 0);
        assert_eq!(s.coverage, 1.0);
    }
}
