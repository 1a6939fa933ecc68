//! `.sq.csv`: one SQ model row per quality attribute.
//!
//! Columns are matched by header name: `qa_id,name,definition,source,dimensions,metrics`.
//! `name` may be omitted and then defaults to the qa id. Dimensions are
//! `|`-joined. Metrics are `;`-joined items of the form
//! `id:kind:unit:"description"`, optionally followed by `:"display name"`.
//! The unit may be quoted; an empty description slot means no description.
//!
//! Inside quoted CSV fields both `""` and `\"` denote a quote and `\\` a
//! backslash.

use std::collections::BTreeSet;

use super::{document_id, ParseResult};
use crate::diag::{Code, Diagnostic, Origin, SourceLocation};
use crate::model::{Dimension, Identifier, MetricKind, MetricSpec, SqEntry, SqModel};

const COLUMNS: [&str; 6] = ["qa_id", "name", "definition", "source", "dimensions", "metrics"];
const REQUIRED: [&str; 5] = ["qa_id", "definition", "source", "dimensions", "metrics"];

pub fn parse_sq(text: &str, file: &str) -> ParseResult<SqModel> {
    let mut diags = Vec::new();
    let id = document_id(file, ".sq.csv");
    let mut model = SqModel::new(id);
    model.origin = Origin::at(SourceLocation::new(file, 1, 1));

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .escape(Some(b'\\'))
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        None => return ParseResult::new(Some(model), diags),
        Some(Err(e)) => {
            diags.push(csv_error(&e, file));
            return ParseResult::new(None, diags);
        }
        Some(Ok(h)) => h,
    };
    let header_line = header.position().map_or(1, |p| p.line() as u32);
    let mut positions = [None::<usize>; 6];
    for (i, name) in header.iter().enumerate() {
        let name = name.trim();
        match COLUMNS.iter().position(|c| *c == name) {
            Some(c) if positions[c].is_some() => diags.push(
                Diagnostic::new(Code::E100, format!("column `{name}` appears twice"))
                    .at(Some(SourceLocation::new(file, header_line, i as u32 + 1))),
            ),
            Some(c) => positions[c] = Some(i),
            None => diags.push(
                Diagnostic::new(
                    Code::E101,
                    format!("unknown column `{name}` (expected {})", COLUMNS.join(",")),
                )
                .at(Some(SourceLocation::new(file, header_line, i as u32 + 1))),
            ),
        }
    }
    for required in REQUIRED {
        let idx = COLUMNS.iter().position(|c| *c == required).unwrap();
        if positions[idx].is_none() {
            diags.push(
                Diagnostic::new(Code::E100, format!("missing column `{required}`"))
                    .at(Some(SourceLocation::new(file, header_line, 1))),
            );
        }
    }
    if crate::diag::has_errors(&diags) {
        return ParseResult::new(None, diags);
    }
    let width = header.len();
    let col = |name: &str| positions[COLUMNS.iter().position(|c| *c == name).unwrap()];

    for record in records {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                diags.push(csv_error(&e, file));
                continue;
            }
        };
        let line = record.position().map_or(1, |p| p.line() as u32);
        let at = |column: usize| Some(SourceLocation::new(file, line, column as u32 + 1));
        if record.len() != width {
            diags.push(
                Diagnostic::new(
                    Code::E100,
                    format!("row has {} fields but the header has {width}", record.len()),
                )
                .at(at(0)),
            );
            continue;
        }
        let field = |name: &str| col(name).map(|i| (i, &record[i]));

        let (qi, qa_raw) = field("qa_id").unwrap();
        let qa_id = match Identifier::new(qa_raw.trim()) {
            Ok(id) => id,
            Err(e) => {
                diags.push(Diagnostic::new(Code::E100, e.to_string()).at(at(qi)));
                continue;
            }
        };
        let name = field("name").map_or_else(|| qa_id.to_string(), |(_, n)| n.to_string());
        let definition = field("definition").unwrap().1.to_string();
        let source_ref = field("source").unwrap().1.to_string();

        let (di, dims_raw) = field("dimensions").unwrap();
        let mut dimensions = BTreeSet::new();
        let mut ok = true;
        for part in dims_raw.split('|').map(str::trim).filter(|p| !p.is_empty()) {
            match part.parse::<Dimension>() {
                Ok(d) => {
                    dimensions.insert(d);
                }
                Err(e) => {
                    diags.push(Diagnostic::new(Code::E102, e.to_string()).at(at(di)));
                    ok = false;
                }
            }
        }
        if ok && dimensions.is_empty() {
            diags.push(
                Diagnostic::new(Code::E003, format!("SQ entry `{qa_id}` has no dimension"))
                    .at(at(di))
                    .on_element(qa_id.as_str()),
            );
            ok = false;
        }

        let (mi, metrics_raw) = field("metrics").unwrap();
        let metrics = match parse_metrics(metrics_raw) {
            Ok(m) => m,
            Err(MetricError { code, message }) => {
                diags.push(Diagnostic::new(code, message).at(at(mi)));
                continue;
            }
        };
        if ok {
            model.entries.push(SqEntry {
                qa_id,
                name,
                definition,
                source_ref,
                dimensions,
                metrics,
                origin: Origin::at(SourceLocation::new(file, line, 1)),
            });
        }
    }
    let document = (!crate::diag::has_errors(&diags)).then_some(model);
    ParseResult::new(document, diags)
}

fn csv_error(e: &csv::Error, file: &str) -> Diagnostic {
    let line = e.position().map_or(1, |p| p.line() as u32);
    Diagnostic::new(Code::E100, format!("malformed CSV: {e}")).at(Some(SourceLocation::new(file, line, 1)))
}

#[derive(Debug)]
struct MetricError {
    code: Code,
    message: String,
}

fn syntax(message: impl Into<String>) -> MetricError {
    MetricError {
        code: Code::E100,
        message: message.into(),
    }
}

/// A `:`/`;` separated slot: either raw text or a quoted string.
#[derive(Debug, PartialEq)]
enum Slot {
    Raw(String),
    Quoted(String),
}

impl Slot {
    fn text(self) -> String {
        match self {
            Slot::Raw(s) | Slot::Quoted(s) => s,
        }
    }
}

/// Splits a metrics cell into items of slots.
fn split_metrics(text: &str) -> Result<Vec<Vec<Slot>>, MetricError> {
    let mut items: Vec<Vec<Slot>> = Vec::new();
    let mut slots: Vec<Slot> = Vec::new();
    let mut raw = String::new();
    let mut quoted: Option<String> = None;
    let mut chars = text.chars().peekable();
    let flush = |raw: &mut String, quoted: &mut Option<String>, slots: &mut Vec<Slot>| {
        match quoted.take() {
            Some(q) => slots.push(Slot::Quoted(q)),
            None => slots.push(Slot::Raw(raw.trim().to_string())),
        }
        raw.clear();
    };
    while let Some(c) = chars.next() {
        match c {
            '"' => {
                if quoted.is_some() || !raw.trim().is_empty() {
                    return Err(syntax("unexpected `\"` in metric"));
                }
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => return Err(syntax("unterminated quoted string in metric")),
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(e @ ('"' | '\\')) => s.push(e),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('r') => s.push('\r'),
                            _ => return Err(syntax("unknown escape in metric string")),
                        },
                        Some(ch) => s.push(ch),
                    }
                }
                quoted = Some(s);
                raw.clear();
            }
            ':' => flush(&mut raw, &mut quoted, &mut slots),
            ';' => {
                flush(&mut raw, &mut quoted, &mut slots);
                items.push(std::mem::take(&mut slots));
            }
            c if quoted.is_some() => {
                if !c.is_whitespace() {
                    return Err(syntax(format!("unexpected `{c}` after quoted string in metric")));
                }
            }
            c => raw.push(c),
        }
    }
    flush(&mut raw, &mut quoted, &mut slots);
    items.push(slots);
    // A trailing `;` or an empty cell leaves one empty raw slot.
    items.retain(|slots| !(slots.len() == 1 && slots[0] == Slot::Raw(String::new())));
    Ok(items)
}

fn parse_metrics(text: &str) -> Result<Vec<MetricSpec>, MetricError> {
    let mut out = Vec::new();
    for slots in split_metrics(text)? {
        if !(3..=5).contains(&slots.len()) {
            return Err(syntax(format!(
                "metric needs `id:kind:unit` with optional description and name, found {} parts",
                slots.len()
            )));
        }
        let mut it = slots.into_iter();
        let id = Identifier::new(it.next().unwrap().text()).map_err(|e| syntax(e.to_string()))?;
        let kind: MetricKind = it.next().unwrap().text().parse().map_err(|e: crate::model::EnumError| MetricError {
            code: Code::E102,
            message: e.to_string(),
        })?;
        let unit = it.next().unwrap().text();
        let description = match it.next() {
            None | Some(Slot::Raw(_)) => None,
            Some(Slot::Quoted(d)) => Some(d),
        };
        let name = match it.next() {
            None => id.to_string(),
            Some(Slot::Quoted(n)) => n,
            Some(Slot::Raw(_)) => return Err(syntax("metric display name must be quoted")),
        };
        out.push(MetricSpec {
            id,
            name,
            metric_kind: kind,
            unit,
            description,
        });
    }
    Ok(out)
}

fn quote_metric(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn format_metric(m: &MetricSpec) -> String {
    let plain_unit = !m.unit.contains([':', ';', '"', '\\', '\n', '\r'])
        && m.unit.trim() == m.unit;
    let unit = if plain_unit { m.unit.clone() } else { quote_metric(&m.unit) };
    let mut out = format!("{}:{}:{}", m.id, m.metric_kind, unit);
    let has_name = m.name != m.id.as_str();
    match &m.description {
        Some(d) => {
            out.push(':');
            out.push_str(&quote_metric(d));
        }
        None if has_name => out.push(':'),
        None => {}
    }
    if has_name {
        out.push(':');
        out.push_str(&quote_metric(&m.name));
    }
    out
}

/// Quotes a CSV field when needed, escaping with backslashes.
fn csv_field(s: &str) -> String {
    if !s.contains([',', '"', '\\', '\n', '\r']) && s.trim() == s {
        return s.to_string();
    }
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

pub fn serialize_sq(model: &SqModel) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for e in &model.entries {
        let dims: Vec<&str> = e.dimensions.iter().map(|d| d.as_str()).collect();
        let metrics: Vec<String> = e.metrics.iter().map(format_metric).collect();
        let row = [
            e.qa_id.to_string(),
            csv_field(&e.name),
            csv_field(&e.definition),
            csv_field(&e.source_ref),
            dims.join("|"),
            csv_field(&metrics.join(";")),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_style_row_without_name_column() {
        let text = "qa_id,definition,source,dimensions,metrics\n\
            execution_time,\"the time it takes to run\",funke2023,technical,\"et_s:external:s:\\\"per-variant execution time\\\"\"\n";
        let r = parse_sq(text, "generic.sq.csv");
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        let m = r.document.unwrap();
        assert_eq!(m.id.as_str(), "generic");
        let e = &m.entries[0];
        assert_eq!(e.qa_id.as_str(), "execution_time");
        assert_eq!(e.name, "execution_time");
        assert_eq!(e.dimensions.iter().copied().collect::<Vec<_>>(), vec![Dimension::Technical]);
        assert_eq!(e.metrics.len(), 1);
        let metric = &e.metrics[0];
        assert_eq!(metric.id.as_str(), "et_s");
        assert_eq!(metric.metric_kind, MetricKind::External);
        assert_eq!(metric.unit, "s");
        assert_eq!(metric.description.as_deref(), Some("per-variant execution time"));
    }

    #[test]
    fn header_only_is_empty_model() {
        let r = parse_sq("qa_id,name,definition,source,dimensions,metrics\n", "p.sq.csv");
        assert!(r.document.unwrap().entries.is_empty());
    }

    #[test]
    fn unknown_dimension_is_e102() {
        let text = "qa_id,name,definition,source,dimensions,metrics\nee,EE,d,s,ecological,\n";
        let r = parse_sq(text, "p.sq.csv");
        assert!(r.document.is_none());
        assert_eq!(r.diagnostics[0].code, Code::E102);
        assert_eq!(r.diagnostics[0].location.as_ref().unwrap().line, 2);
    }

    #[test]
    fn ragged_row_is_e100() {
        let r = parse_sq("qa_id,name,definition,source,dimensions,metrics\nee,EE\n", "p.sq.csv");
        assert_eq!(r.diagnostics[0].code, Code::E100);
    }

    #[test]
    fn metric_forms_round_trip() {
        let text = "qa_id,name,definition,source,dimensions,metrics\n\
            ee,Energy,\"a, b\",x,environmental|technical,\"ee_j:external:J:\\\"total energy\\\";m2:internal:\\\"k:W;h\\\"::\\\"Two\\\"\"\n";
        let r = parse_sq(text, "p.sq.csv");
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        let m = r.document.unwrap();
        let metrics = &m.entries[0].metrics;
        assert_eq!(metrics[1].unit, "k:W;h");
        assert_eq!(metrics[1].description, None);
        assert_eq!(metrics[1].name, "Two");
        let again = parse_sq(&serialize_sq(&m), "p.sq.csv").document.unwrap();
        assert_eq!(again, m);
    }
}
