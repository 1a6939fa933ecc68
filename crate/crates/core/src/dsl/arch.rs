//! `.arch.saf`: architecture elements, design decisions and the features
//! that represent them.
//!
//! ```text
//! arch       := "architecture" ID "{" item* "}"
//! item       := (element | decision | represents) ";"?
//! element    := "element" ID STRING "kind" KIND
//! KIND       := "software_service" | "component" | "other" STRING
//! decision   := "decision" ID STRING ("options" STRING ("|" STRING)*)? ("chosen" INT)?
//!               ("pertains_to" ID+)? ("characterized_by" ID+)?
//! represents := "represents" FEATURE_ID DECISION_ID
//! ```

use std::fmt::Write as _;

use super::cursor::{Abort, Cursor, Step};
use super::dm::join;
use super::lexer::{quote, Tok};
use super::ParseResult;
use crate::archtrace::{canonicalize_arch, ArchitectureDescription, ArchitectureElement, DesignDecision, ElementKind};
use crate::diag::{Code, Diagnostic};

const ITEMS: &[&str] = &["element", "decision", "represents"];
const CLAUSES: &[&str] = &[
    "element",
    "decision",
    "represents",
    "options",
    "chosen",
    "pertains_to",
    "characterized_by",
];

pub fn parse_arch(text: &str, file: &str) -> ParseResult<ArchitectureDescription> {
    let mut cur = Cursor::new(text, file);
    let doc = parse_doc(&mut cur);
    ParseResult::new(doc, cur.diags)
}

fn parse_doc(cur: &mut Cursor) -> Option<ArchitectureDescription> {
    let origin = cur.origin();
    let header: Step<ArchitectureDescription> = (|| {
        cur.keyword("architecture")?;
        let id = cur.ident(&[])?;
        cur.expect(&Tok::LBrace)?;
        Ok(ArchitectureDescription::new(id))
    })();
    let mut doc = header.ok()?;
    doc.origin = origin;
    while !matches!(cur.peek(), Tok::RBrace | Tok::Eof) {
        match parse_item(cur, &mut doc) {
            Ok(()) => {
                cur.eat(&Tok::Semi);
            }
            Err(Abort) => cur.recover(ITEMS),
        }
    }
    if cur.expect(&Tok::RBrace).is_ok() && !cur.at_eof() {
        let found = cur.peek().describe();
        cur.error_here(Code::E100, format!("unexpected {found} after the end of the architecture"));
    }
    Some(doc)
}

fn parse_item(cur: &mut Cursor, doc: &mut ArchitectureDescription) -> Step<()> {
    let origin = cur.origin();
    let word = match cur.peek() {
        Tok::Word(w) => w.clone(),
        Tok::Semi => {
            cur.advance();
            return Ok(());
        }
        _ => return Err(cur.expected("`element`, `decision`, `represents` or `}`")),
    };
    match word.as_str() {
        "element" => {
            cur.advance();
            let id = cur.ident(CLAUSES)?;
            let name = cur.string()?;
            cur.keyword("kind")?;
            let kind = match cur.peek() {
                Tok::Word(w) if w == "software_service" => {
                    cur.advance();
                    ElementKind::SoftwareService
                }
                Tok::Word(w) if w == "component" => {
                    cur.advance();
                    ElementKind::Component
                }
                Tok::Word(w) if w == "other" => {
                    cur.advance();
                    ElementKind::Other(cur.string()?)
                }
                Tok::Word(w) => {
                    let w = w.clone();
                    return Err(cur.error_here(
                        Code::E102,
                        format!("`{w}` is not an element kind (expected software_service, component or other \"label\")"),
                    ));
                }
                _ => return Err(cur.expected("an element kind")),
            };
            doc.elements.push(ArchitectureElement { id, name, kind, origin });
        }
        "decision" => {
            cur.advance();
            let id = cur.ident(CLAUSES)?;
            let statement = cur.string()?;
            let mut decision = DesignDecision {
                id,
                statement,
                options: Vec::new(),
                chosen: None,
                pertains_to: Vec::new(),
                characterized_by: Vec::new(),
                origin,
            };
            if cur.is_word("options") {
                cur.advance();
                decision.options.push(cur.string()?);
                while cur.eat(&Tok::Pipe) {
                    decision.options.push(cur.string()?);
                }
            }
            if cur.is_word("chosen") {
                cur.advance();
                let n = cur.number()?;
                if n < 0.0 || n.fract() != 0.0 || n > u32::MAX as f64 {
                    return Err(cur.error_here(Code::E100, format!("`chosen` needs an option index, found {n}")));
                }
                decision.chosen = Some(n as usize);
            }
            if cur.is_word("pertains_to") {
                cur.advance();
                decision.pertains_to = cur.ident_list(CLAUSES)?;
            }
            if cur.is_word("characterized_by") {
                cur.advance();
                decision.characterized_by = cur.ident_list(CLAUSES)?;
            }
            doc.decisions.push(decision);
        }
        "represents" => {
            cur.advance();
            let loc = cur.location();
            let feature = cur.ident(CLAUSES)?;
            let decision = cur.ident(CLAUSES)?;
            if doc.represents.contains_key(&feature) {
                cur.diags.push(
                    Diagnostic::new(Code::E002, format!("feature `{feature}` already represents a decision"))
                        .at(Some(loc))
                        .on_element(feature.as_str()),
                );
            } else {
                doc.represents_origins.insert(feature.clone(), origin);
                doc.represents.insert(feature, decision);
            }
        }
        other => {
            return Err(cur.error_here(Code::E101, format!("unknown keyword `{other}` in architecture")));
        }
    }
    Ok(())
}

pub fn serialize_arch(doc: &ArchitectureDescription) -> String {
    let doc = canonicalize_arch(doc);
    let mut out = String::new();
    let _ = writeln!(out, "architecture {} {{", doc.id);
    for e in &doc.elements {
        let kind = match &e.kind {
            ElementKind::SoftwareService => "software_service".to_string(),
            ElementKind::Component => "component".to_string(),
            ElementKind::Other(label) => format!("other {}", quote(label)),
        };
        let _ = writeln!(out, "  element {} {} kind {kind};", e.id, quote(&e.name));
    }
    for d in &doc.decisions {
        let _ = write!(out, "  decision {} {}", d.id, quote(&d.statement));
        if !d.options.is_empty() {
            let opts: Vec<String> = d.options.iter().map(|o| quote(o)).collect();
            let _ = write!(out, " options {}", opts.join(" | "));
        }
        if let Some(c) = d.chosen {
            let _ = write!(out, " chosen {c}");
        }
        if !d.pertains_to.is_empty() {
            let _ = write!(out, " pertains_to {}", join(&d.pertains_to));
        }
        if !d.characterized_by.is_empty() {
            let _ = write!(out, " characterized_by {}", join(&d.characterized_by));
        }
        out.push_str(";\n");
    }
    for (feature, decision) in &doc.represents {
        let _ = writeln!(out, "  represents {feature} {decision};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CLOUD: &str = r#"architecture cloud {
  element autoscaler "Autoscaler" kind software_service;
  element lb "Load balancer" kind component;
  element ops "Ops runbook" kind other "process";
  decision scaling_mode "How capacity follows load" options "auto-scaling" | "manual scaling" chosen 0 pertains_to availability_peak characterized_by cost_efficiency;
  represents scalability scaling_mode;
}
"#;

    #[test]
    fn cloud_parses() {
        let r = parse_arch(CLOUD, "cloud.arch.saf");
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        let doc = r.document.unwrap();
        assert_eq!(doc.elements.len(), 3);
        let d = doc.decision("scaling_mode").unwrap();
        assert_eq!(d.options, vec!["auto-scaling", "manual scaling"]);
        assert_eq!(d.chosen_option(), Some("auto-scaling"));
        assert_eq!(doc.represents.get("scalability").map(|d| d.as_str()), Some("scaling_mode"));
        assert_eq!(doc.element("ops").unwrap().kind, ElementKind::Other("process".into()));
    }

    #[test]
    fn round_trip() {
        let doc = parse_arch(CLOUD, "cloud.arch.saf").document.unwrap();
        let text = serialize_arch(&doc);
        let again = parse_arch(&text, "cloud.arch.saf").document.unwrap();
        assert_eq!(again, canonicalize_arch(&doc));
        assert_eq!(serialize_arch(&again), text);
    }

    #[test]
    fn unknown_kind_is_e102() {
        let r = parse_arch("architecture a { element x \"X\" kind gadget; }", "a.arch.saf");
        assert_eq!(r.diagnostics[0].code, Code::E102);
        assert!(r.document.is_none());
    }

    #[test]
    fn fractional_chosen_is_rejected() {
        let r = parse_arch("architecture a { decision d \"D\" options \"x\" chosen 0.5; }", "a.arch.saf");
        assert_eq!(r.diagnostics[0].code, Code::E100);
    }
}
