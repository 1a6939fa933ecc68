//! `.dm.saf`: the textual twin of the decision map notation.
//!
//! ```text
//! dm      := "decision_map" ID STRING "system" STRING "{" item* "}"
//! item    := feature | qa | req | effect | goal | meta
//! feature := "feature" ID STRING ("description" STRING)?
//!            ("{" ("variant" ID STRING | "realized_by" ID+)* "}")?
//! qa      := "qa" ID STRING "dimension" DIM "impact" LEVEL ("description" STRING)?
//! req     := "requirement" ID STRING "dimension" DIM "impact" LEVEL ("description" STRING)?
//! effect  := "effect" REF "->" ID EFFECTTYPE ("label" STRING)?
//! REF     := ID | ID "." ID
//! goal    := "goal" ID STRING ("concerns" ID+)?
//! meta    := "meta" ID STRING
//! ```
//!
//! Item keywords are reserved and cannot be used as identifiers. `#` starts
//! a comment that runs to the end of the line; comments are not preserved.

use std::fmt::Write as _;

use super::cursor::{Cursor, Step};
use super::lexer::{quote, Tok};
use super::ParseResult;
use crate::diag::{Code, Diagnostic};
use crate::model::{
    canonicalize, Concern, ConcernKind, DecisionMap, Effect, EffectSource, Feature, SustainabilityGoal, Variant,
};

const ITEMS: &[&str] = &["feature", "qa", "requirement", "effect", "goal", "meta"];
const FEATURE_ITEMS: &[&str] = &["variant", "realized_by"];

pub fn parse_dm(text: &str, file: &str) -> ParseResult<DecisionMap> {
    let mut cur = Cursor::new(text, file);
    let map = parse_map(&mut cur);
    ParseResult::new(map, cur.diags)
}

fn parse_map(cur: &mut Cursor) -> Option<DecisionMap> {
    let origin = cur.origin();
    let header: Step<DecisionMap> = (|| {
        cur.keyword("decision_map")?;
        let id = cur.ident(&[])?;
        let title = cur.string()?;
        cur.keyword("system")?;
        let system = cur.string()?;
        cur.expect(&Tok::LBrace)?;
        Ok(DecisionMap::new(id, title, system))
    })();
    let mut map = header.ok()?;
    map.origin = origin;

    while !matches!(cur.peek(), Tok::RBrace | Tok::Eof) {
        if parse_item(cur, &mut map).is_err() {
            cur.recover(ITEMS);
        }
    }
    if cur.expect(&Tok::RBrace).is_ok() && !cur.at_eof() {
        let found = cur.peek().describe();
        cur.error_here(Code::E100, format!("unexpected {found} after the end of the decision map"));
    }
    Some(map)
}

fn parse_item(cur: &mut Cursor, map: &mut DecisionMap) -> Step<()> {
    let origin = cur.origin();
    let word = match cur.peek() {
        Tok::Word(w) => w.clone(),
        _ => return Err(cur.expected("an item keyword (feature, qa, requirement, effect, goal, meta) or `}`")),
    };
    match word.as_str() {
        "feature" => {
            cur.advance();
            let id = cur.ident(ITEMS)?;
            let name = cur.string()?;
            let description = optional_string(cur, "description")?;
            let mut feature = Feature {
                id,
                name,
                description,
                variants: Vec::new(),
                realized_by: Vec::new(),
                origin,
            };
            if cur.eat(&Tok::LBrace) {
                parse_feature_block(cur, &mut feature);
                cur.expect(&Tok::RBrace)?;
            }
            map.features.push(feature);
        }
        "qa" | "requirement" => {
            cur.advance();
            let kind = if word == "qa" {
                ConcernKind::QualityAttribute
            } else {
                ConcernKind::SustainabilityRequirement
            };
            let id = cur.ident(ITEMS)?;
            let name = cur.string()?;
            cur.keyword("dimension")?;
            let dimension = cur.enum_value("a dimension")?;
            cur.keyword("impact")?;
            let impact = cur.enum_value("an impact level")?;
            let description = optional_string(cur, "description")?;
            map.concerns.push(Concern {
                id,
                name,
                kind,
                dimension,
                impact,
                description,
                origin,
            });
        }
        "effect" => {
            cur.advance();
            let id = cur.ident(ITEMS)?;
            let source = if cur.eat(&Tok::Dot) {
                EffectSource::variant(id, cur.ident(ITEMS)?)
            } else {
                EffectSource::node(id)
            };
            cur.expect(&Tok::Arrow)?;
            let target = cur.ident(ITEMS)?;
            let effect_type = cur.enum_value("an effect type")?;
            let impact_label = optional_string(cur, "label")?;
            map.effects.push(Effect {
                source,
                target,
                effect_type,
                impact_label,
                origin,
            });
        }
        "goal" => {
            cur.advance();
            let id = cur.ident(ITEMS)?;
            let statement = cur.string()?;
            let linked_concerns = if cur.is_word("concerns") {
                cur.advance();
                cur.ident_list(ITEMS)?
            } else {
                Vec::new()
            };
            map.goals.push(SustainabilityGoal {
                id,
                statement,
                linked_concerns,
                origin,
            });
        }
        "meta" => {
            cur.advance();
            let key_loc = cur.location();
            let key = cur.ident(ITEMS)?;
            let value = cur.string()?;
            match map.metadata.entry(key) {
                std::collections::btree_map::Entry::Occupied(e) => cur.diags.push(
                    Diagnostic::new(Code::E002, format!("duplicate metadata key `{}`", e.key()))
                        .at(Some(key_loc))
                        .on_element(e.key().as_str()),
                ),
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(value);
                }
            }
        }
        other => {
            return Err(cur.error_here(Code::E101, format!("unknown keyword `{other}` in decision map")));
        }
    }
    Ok(())
}

fn parse_feature_block(cur: &mut Cursor, feature: &mut Feature) {
    while !matches!(cur.peek(), Tok::RBrace | Tok::Eof) {
        let step: Step<()> = (|| {
            let origin = cur.origin();
            match cur.peek() {
                Tok::Word(w) if w == "variant" => {
                    cur.advance();
                    let id = cur.ident(FEATURE_ITEMS)?;
                    let name = cur.string()?;
                    feature.variants.push(Variant { id, name, origin });
                }
                Tok::Word(w) if w == "realized_by" => {
                    cur.advance();
                    let ids = cur.ident_list(FEATURE_ITEMS)?;
                    feature.realized_by.extend(ids);
                }
                Tok::Word(w) => {
                    let w = w.clone();
                    return Err(cur.error_here(Code::E101, format!("unknown keyword `{w}` in feature block")));
                }
                _ => return Err(cur.expected("`variant`, `realized_by` or `}`")),
            }
            Ok(())
        })();
        if step.is_err() {
            cur.recover(FEATURE_ITEMS);
        }
    }
}

fn optional_string(cur: &mut Cursor, keyword: &str) -> Step<Option<String>> {
    if cur.is_word(keyword) {
        cur.advance();
        cur.string().map(Some)
    } else {
        Ok(None)
    }
}

/// Canonical text of a decision map.
pub fn serialize_dm(map: &DecisionMap) -> String {
    let map = canonicalize(map);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "decision_map {} {} system {} {{",
        map.id,
        quote(&map.title),
        quote(&map.system_name)
    );
    for (key, value) in &map.metadata {
        let _ = writeln!(out, "  meta {key} {}", quote(value));
    }
    for f in &map.features {
        let _ = write!(out, "  feature {} {}", f.id, quote(&f.name));
        if let Some(d) = &f.description {
            let _ = write!(out, " description {}", quote(d));
        }
        if f.variants.is_empty() && f.realized_by.is_empty() {
            out.push('\n');
            continue;
        }
        out.push_str(" {\n");
        for v in &f.variants {
            let _ = writeln!(out, "    variant {} {}", v.id, quote(&v.name));
        }
        if !f.realized_by.is_empty() {
            let _ = writeln!(out, "    realized_by {}", join(&f.realized_by));
        }
        out.push_str("  }\n");
    }
    for c in &map.concerns {
        let _ = write!(
            out,
            "  {} {} {} dimension {} impact {}",
            c.kind.keyword(),
            c.id,
            quote(&c.name),
            c.dimension,
            c.impact
        );
        if let Some(d) = &c.description {
            let _ = write!(out, " description {}", quote(d));
        }
        out.push('\n');
    }
    for e in &map.effects {
        let _ = write!(out, "  effect {} -> {} {}", e.source, e.target, e.effect_type);
        if let Some(l) = &e.impact_label {
            let _ = write!(out, " label {}", quote(l));
        }
        out.push('\n');
    }
    for g in &map.goals {
        let _ = write!(out, "  goal {} {}", g.id, quote(&g.statement));
        if !g.linked_concerns.is_empty() {
            let _ = write!(out, " concerns {}", join(&g.linked_concerns));
        }
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

pub(crate) fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}
