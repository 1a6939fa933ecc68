//! Effect suggestions read off the dependency matrices.

use serde::{Deserialize, Serialize};

use crate::model::{DecisionMap, DependencyMatrix, EffectType, Identifier};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub source_qa: Identifier,
    pub target_qa: Identifier,
    pub suggested_type: EffectType,
    pub matrix_id: Identifier,
    /// True when the suggestion resolves an existing undecided effect
    /// rather than proposing a new one.
    pub resolves_existing: bool,
    pub rationale: String,
}

/// Advisory only; the map is never changed. Ordered by (matrix id, row, col).
pub fn suggest_effects(dm: &DecisionMap, matrices: &[DependencyMatrix]) -> Vec<Suggestion> {
    let mut ordered: Vec<&DependencyMatrix> = matrices.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = Vec::new();
    for m in ordered {
        for (row, col, cell) in m.iter_cells() {
            if row == col || dm.concern(row.as_str()).is_none() || dm.concern(col.as_str()).is_none() {
                continue;
            }
            let existing = dm
                .effects
                .iter()
                .find(|e| e.source.variant.is_none() && e.source.id == *row && e.target == *col);
            let suggested = cell.suggested_effect();
            let (resolves_existing, rationale) = match existing {
                None => (
                    false,
                    format!("matrix `{}` records `{cell}` from {row} to {col}; the map has no effect between them", m.id),
                ),
                Some(e) if e.effect_type == EffectType::Undecided && suggested != EffectType::Undecided => (
                    true,
                    format!("matrix `{}` records `{cell}` from {row} to {col}; the map leaves this effect undecided", m.id),
                ),
                Some(_) => continue,
            };
            out.push(Suggestion {
                source_qa: row.clone(),
                target_qa: col.clone(),
                suggested_type: suggested,
                matrix_id: m.id.clone(),
                resolves_existing,
                rationale,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_dm, parse_matrix_file};

    #[test]
    fn efficiency_supports_trust() {
        let dm = parse_dm(
            r#"decision_map d "D" system "S" {
  qa efficiency "Efficiency" dimension technical impact immediate
  qa trust "Trust" dimension social impact enabling
}"#,
            "d.dm.saf",
        )
        .document
        .unwrap();
        let m = parse_matrix_file("# dims: technical x social\n,trust\nefficiency,+\n", "ts.matrix.csv")
            .document
            .unwrap();
        let s = suggest_effects(&dm, std::slice::from_ref(&m));
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].suggested_type, EffectType::Positive);
        assert_eq!((s[0].source_qa.as_str(), s[0].target_qa.as_str()), ("efficiency", "trust"));
        assert!(!s[0].resolves_existing);

        let other = parse_matrix_file("# dims: technical x social\n,privacy\nlatency,-\n", "x.matrix.csv")
            .document
            .unwrap();
        assert!(suggest_effects(&dm, &[other]).is_empty());
    }
}
