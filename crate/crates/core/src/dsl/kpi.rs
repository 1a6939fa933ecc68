//! `.kpi.saf`: goals, critical success factors, KPIs and actions.
//!
//! ```text
//! doc    := item*
//! item   := goal | csf | kpi | action
//! goal   := "goal" ID STRING ("sustainability_goal" ID)?
//! csf    := "csf" ID STRING "goal" ID
//! kpi    := "kpi" ID STRING "csf" ID "expr" STRING "target" CMP NUMBER ("unit" STRING)?
//!           "concerns" ID+ ("on_miss" ID+)?
//! action := "action" ID STRING ("concerns" ID+)?
//! ```
//!
//! The document id is taken from the file name.

use std::fmt::Write as _;

use super::cursor::{Cursor, Step};
use super::dm::join;
use super::lexer::{quote, Tok};
use super::{document_id, ParseResult};
use crate::diag::{Code, Diagnostic, SourceLocation};
use crate::kpi::{
    canonicalize_kpi, format_number, ActionSpec, Comparator, CriticalSuccessFactor, ExprError, FitnessExpression,
    KpiDocument, KpiSpec, OrganizationalGoal, Target,
};

const ITEMS: &[&str] = &["goal", "csf", "kpi", "action"];
const KPI_LIST_STOP: &[&str] = &["goal", "csf", "kpi", "action", "on_miss"];

pub fn parse_kpi_document(text: &str, file: &str) -> ParseResult<KpiDocument> {
    let mut cur = Cursor::new(text, file);
    let mut doc = KpiDocument::new(document_id(file, ".kpi.saf"));
    doc.origin = crate::diag::Origin::at(SourceLocation::new(file, 1, 1));
    while !cur.at_eof() {
        if parse_item(&mut cur, &mut doc).is_err() {
            cur.recover(ITEMS);
            // A stray `}` is not an item start; step over it.
            if matches!(cur.peek(), Tok::RBrace) {
                cur.advance();
            }
        }
    }
    ParseResult::new(Some(doc), cur.diags)
}

fn parse_item(cur: &mut Cursor, doc: &mut KpiDocument) -> Step<()> {
    let origin = cur.origin();
    let word = match cur.peek() {
        Tok::Word(w) => w.clone(),
        _ => return Err(cur.expected("an item keyword (goal, csf, kpi, action)")),
    };
    match word.as_str() {
        "goal" => {
            cur.advance();
            let id = cur.ident(ITEMS)?;
            let statement = cur.string()?;
            let sustainability_goal_ref = if cur.is_word("sustainability_goal") {
                cur.advance();
                Some(cur.ident(ITEMS)?)
            } else {
                None
            };
            doc.goals.push(OrganizationalGoal {
                id,
                statement,
                sustainability_goal_ref,
                origin,
            });
        }
        "csf" => {
            cur.advance();
            let id = cur.ident(ITEMS)?;
            let statement = cur.string()?;
            cur.keyword("goal")?;
            let goal_ref = cur.ident(ITEMS)?;
            doc.csfs.push(CriticalSuccessFactor {
                id,
                statement,
                goal_ref,
                origin,
            });
        }
        "kpi" => {
            cur.advance();
            let id = cur.ident(ITEMS)?;
            let name = cur.string()?;
            cur.keyword("csf")?;
            let csf_ref = cur.ident(ITEMS)?;
            cur.keyword("expr")?;
            let expr_loc = cur.location();
            let expr_text = cur.string()?;
            let expression = match FitnessExpression::parse(&expr_text) {
                Ok(e) => e,
                Err(e) => {
                    let code = match e {
                        ExprError::Syntax { .. } => Code::E100,
                        ExprError::Duration { .. } => Code::E402,
                    };
                    cur.diags.push(
                        Diagnostic::new(code, format!("in fitness expression: {e}"))
                            .at(Some(expr_loc))
                            .on_element(id.as_str()),
                    );
                    return Err(super::cursor::Abort);
                }
            };
            cur.keyword("target")?;
            let comparator = match cur.peek() {
                Tok::Cmp(c) => {
                    let c: Comparator = c.parse().expect("lexer yields valid comparators");
                    cur.advance();
                    c
                }
                Tok::Word(w) => {
                    let w = w.clone();
                    return Err(cur.error_here(
                        Code::E102,
                        format!("`{w}` is not a comparator (expected one of: <, <=, >, >=)"),
                    ));
                }
                _ => return Err(cur.expected("a comparator")),
            };
            let threshold = cur.number()?;
            let unit = if cur.is_word("unit") {
                cur.advance();
                cur.string()?
            } else {
                String::new()
            };
            cur.keyword("concerns")?;
            let concern_refs = cur.ident_list(KPI_LIST_STOP)?;
            let action_refs = if cur.is_word("on_miss") {
                cur.advance();
                cur.ident_list(KPI_LIST_STOP)?
            } else {
                Vec::new()
            };
            doc.kpis.push(KpiSpec {
                id,
                name,
                csf_ref,
                expression,
                target: Target {
                    comparator,
                    threshold,
                    unit,
                },
                concern_refs,
                action_refs,
                origin,
            });
        }
        "action" => {
            cur.advance();
            let id = cur.ident(ITEMS)?;
            let description = cur.string()?;
            let concern_refs = if cur.is_word("concerns") {
                cur.advance();
                cur.ident_list(ITEMS)?
            } else {
                Vec::new()
            };
            doc.actions.push(ActionSpec {
                id,
                description,
                concern_refs,
                origin,
            });
        }
        other => {
            return Err(cur.error_here(Code::E101, format!("unknown keyword `{other}` in KPI document")));
        }
    }
    Ok(())
}

pub fn serialize_kpi_document(doc: &KpiDocument) -> String {
    let doc = canonicalize_kpi(doc);
    let mut out = String::new();
    for g in &doc.goals {
        let _ = write!(out, "goal {} {}", g.id, quote(&g.statement));
        if let Some(s) = &g.sustainability_goal_ref {
            let _ = write!(out, " sustainability_goal {s}");
        }
        out.push('\n');
    }
    for c in &doc.csfs {
        let _ = writeln!(out, "csf {} {} goal {}", c.id, quote(&c.statement), c.goal_ref);
    }
    for k in &doc.kpis {
        let _ = write!(
            out,
            "kpi {} {}\n  csf {}\n  expr {}\n  target {} {}",
            k.id,
            quote(&k.name),
            k.csf_ref,
            quote(&k.expression.to_string()),
            k.target.comparator,
            format_number(k.target.threshold)
        );
        if !k.target.unit.is_empty() {
            let _ = write!(out, " unit {}", quote(&k.target.unit));
        }
        let _ = write!(out, "\n  concerns {}", join(&k.concern_refs));
        if !k.action_refs.is_empty() {
            let _ = write!(out, "\n  on_miss {}", join(&k.action_refs));
        }
        out.push('\n');
    }
    for a in &doc.actions {
        let _ = write!(out, "action {} {}", a.id, quote(&a.description));
        if !a.concern_refs.is_empty() {
            let _ = write!(out, " concerns {}", join(&a.concern_refs));
        }
        out.push('\n');
    }
    out
}
