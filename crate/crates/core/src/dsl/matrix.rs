//! `.matrix.csv`: an interdimensional dependency grid.
//!
//! ```text
//! # dims: technical x environmental
//! ,interoperability,modifiability
//! interoperability,,-
//! ```
//!
//! The first record holds the column QAs (its first cell is ignored), each
//! following record starts with a row QA. Cells are `+`, `-`, `I` or blank.
//! Headers that are not already identifiers are slug-normalized.

use super::{document_id, ParseResult};
use crate::diag::{has_errors, Code, Diagnostic, Origin, SourceLocation};
use crate::model::{DependencyMatrix, DependencyValue, Dimension, Identifier};

/// Parses a grid whose dimension pair is given by the caller.
pub fn parse_matrix(text: &str, file: &str, row_dim: Dimension, col_dim: Dimension) -> ParseResult<DependencyMatrix> {
    let mut diags = Vec::new();
    let id = document_id(file, ".matrix.csv");
    let mut matrix = match DependencyMatrix::new(id, row_dim, col_dim) {
        Ok(m) => m,
        Err(e) => {
            diags.push(Diagnostic::new(Code::E100, e.to_string()).at(Some(SourceLocation::new(file, 1, 1))));
            return ParseResult::new(None, diags);
        }
    };
    matrix.origin = Origin::at(SourceLocation::new(file, 1, 1));

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .escape(Some(b'\\'))
        .from_reader(text.as_bytes());
    let mut width = None;
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(1, |p| p.line() as u32);
                diags.push(
                    Diagnostic::new(Code::E100, format!("malformed CSV: {e}"))
                        .at(Some(SourceLocation::new(file, line, 1))),
                );
                continue;
            }
        };
        let line = record.position().map_or(1, |p| p.line() as u32);
        let at = |i: usize| Some(SourceLocation::new(file, line, i as u32 + 1));
        let Some(width) = width else {
            width = Some(record.len());
            for (i, h) in record.iter().enumerate().skip(1) {
                match header(h) {
                    Some(id) => matrix.cols.push(id),
                    None => diags.push(
                        Diagnostic::new(Code::E100, format!("column header `{h}` is not a usable identifier")).at(at(i)),
                    ),
                }
            }
            continue;
        };
        if record.len() != width {
            diags.push(
                Diagnostic::new(
                    Code::E100,
                    format!("ragged grid: row has {} cells, header has {width}", record.len()),
                )
                .at(at(0)),
            );
            continue;
        }
        let Some(row) = header(&record[0]) else {
            diags.push(
                Diagnostic::new(Code::E100, format!("row header `{}` is not a usable identifier", &record[0])).at(at(0)),
            );
            continue;
        };
        matrix.rows.push(row.clone());
        for (i, cell) in record.iter().enumerate().skip(1) {
            let cell = cell.trim();
            if cell.is_empty() {
                continue;
            }
            match cell.parse::<DependencyValue>() {
                Ok(v) => {
                    if let Some(col) = matrix.cols.get(i - 1) {
                        matrix.cells.insert((row.clone(), col.clone()), v);
                    }
                }
                Err(e) => diags.push(Diagnostic::new(Code::E102, e.to_string()).at(at(i))),
            }
        }
    }
    let document = (!has_errors(&diags)).then_some(matrix);
    ParseResult::new(document, diags)
}

fn header(text: &str) -> Option<Identifier> {
    let text = text.trim();
    Identifier::new(text).ok().or_else(|| Identifier::slugify(text))
}

/// Reads the `# dims: <row> x <col>` front matter, then the grid.
pub fn parse_matrix_file(text: &str, file: &str) -> ParseResult<DependencyMatrix> {
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let Some(comment) = trimmed.strip_prefix('#') else {
            break;
        };
        let Some(spec) = comment.trim().strip_prefix("dims:") else {
            continue;
        };
        let loc = Some(SourceLocation::new(file, n as u32 + 1, 1));
        let parts: Vec<&str> = spec.split_whitespace().collect();
        if parts.len() != 3 || parts[1] != "x" {
            let d = Diagnostic::new(Code::E100, "front matter must read `# dims: <row> x <col>`").at(loc);
            return ParseResult::new(None, vec![d]);
        }
        let dims: Result<Vec<Dimension>, _> = [parts[0], parts[2]].iter().map(|p| p.parse()).collect();
        return match dims {
            Ok(d) => parse_matrix(text, file, d[0], d[1]),
            Err(e) => ParseResult::new(None, vec![Diagnostic::new(Code::E102, e.to_string()).at(loc)]),
        };
    }
    let d = Diagnostic::new(Code::E100, "missing `# dims: <row> x <col>` front matter")
        .at(Some(SourceLocation::new(file, 1, 1)));
    ParseResult::new(None, vec![d])
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\\', '\n', '\r', '#']) || s.trim() != s {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    } else {
        s.to_string()
    }
}

pub fn serialize_matrix(m: &DependencyMatrix) -> String {
    let mut out = format!("# dims: {} x {}\n", m.row_dimension, m.col_dimension);
    if m.rows.is_empty() && m.cols.is_empty() {
        return out;
    }
    // The corner cell is written as `qa` so the header record is never an
    // empty line, which CSV readers skip.
    let mut header = vec!["qa".to_string()];
    header.extend(m.cols.iter().map(|c| csv_field(c.as_str())));
    out.push_str(&header.join(","));
    out.push('\n');
    for r in &m.rows {
        let mut row = vec![r.to_string()];
        for c in &m.cols {
            row.push(
                m.cells
                    .get(&(r.clone(), c.clone()))
                    .map_or(String::new(), |v| v.as_str().to_string()),
            );
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
