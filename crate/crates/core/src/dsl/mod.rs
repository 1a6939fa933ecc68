//! Text formats for every document kind: parsers with located diagnostics
//! and canonical serializers.

mod arch;
mod cursor;
mod dm;
mod kpi;
pub mod lexer;
mod matrix;
mod sq;

use std::path::{Path, PathBuf};

pub use arch::{parse_arch, serialize_arch};
pub use dm::{parse_dm, serialize_dm};
pub use kpi::{parse_kpi_document, serialize_kpi_document};
pub use matrix::{parse_matrix, parse_matrix_file, serialize_matrix};
pub use sq::{parse_sq, serialize_sq};

use crate::archtrace::canonicalize_arch;
use crate::diag::{has_errors, sort_diagnostics, Code, Diagnostic, SourceLocation};
use crate::kpi::canonicalize_kpi;
use crate::model::{canonicalize, resolve_workspace, Document, DocumentKind, Identifier, Workspace};

/// A parsed document together with its diagnostics. The document is present
/// exactly when no diagnostic has error severity.
#[derive(Debug, Clone)]
pub struct ParseResult<T> {
    pub document: Option<T>,
    pub diagnostics: Vec<Diagnostic>,
}

impl<T> ParseResult<T> {
    pub fn new(document: Option<T>, mut diagnostics: Vec<Diagnostic>) -> Self {
        sort_diagnostics(&mut diagnostics);
        let document = if has_errors(&diagnostics) { None } else { document };
        Self { document, diagnostics }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> ParseResult<U> {
        ParseResult {
            document: self.document.map(f),
            diagnostics: self.diagnostics,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.document.is_some()
    }
}

/// The document id implied by a file name: the base name without its kind
/// extension, slug-normalized.
pub fn document_id(file: &str, extension: &str) -> Identifier {
    let base = Path::new(file)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem = base.strip_suffix(extension).unwrap_or(&base);
    Identifier::new(stem)
        .ok()
        .or_else(|| Identifier::slugify(stem))
        .unwrap_or_else(|| Identifier::new("document").expect("valid literal"))
}

pub fn parse_document(kind: DocumentKind, text: &str, file: &str) -> ParseResult<Document> {
    match kind {
        DocumentKind::Dm => parse_dm(text, file).map(Document::DecisionMap),
        DocumentKind::Sq => parse_sq(text, file).map(Document::SqModel),
        DocumentKind::Matrix => parse_matrix_file(text, file).map(Document::Matrix),
        DocumentKind::Kpi => parse_kpi_document(text, file).map(Document::Kpi),
        DocumentKind::Arch => parse_arch(text, file).map(Document::Architecture),
    }
}

/// Parses raw bytes. Invalid UTF-8 is reported as E100 at the first bad byte.
pub fn parse_document_bytes(kind: DocumentKind, bytes: &[u8], file: &str) -> ParseResult<Document> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_document(kind, text, file),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = valid.iter().filter(|b| **b == b'\n').count() as u32 + 1;
            let line_start = valid.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
            let column = String::from_utf8_lossy(&valid[line_start..]).chars().count() as u32 + 1;
            let d = Diagnostic::new(Code::E100, "file is not valid UTF-8")
                .at(Some(SourceLocation::new(file, line, column)));
            ParseResult::new(None, vec![d])
        }
    }
}

/// The form `parse(serialize(doc))` yields. SQ rows and matrix grids keep
/// their authored order, so only the block documents are reordered.
pub fn canonicalize_document(doc: &Document) -> Document {
    match doc {
        Document::DecisionMap(d) => Document::DecisionMap(canonicalize(d)),
        Document::Kpi(d) => Document::Kpi(canonicalize_kpi(d)),
        Document::Architecture(d) => Document::Architecture(canonicalize_arch(d)),
        other => other.clone(),
    }
}

pub fn serialize_document(doc: &Document) -> String {
    match doc {
        Document::DecisionMap(d) => serialize_dm(d),
        Document::SqModel(d) => serialize_sq(d),
        Document::Matrix(d) => serialize_matrix(d),
        Document::Kpi(d) => serialize_kpi_document(d),
        Document::Architecture(d) => serialize_arch(d),
    }
}

/// Every model file below `dir`, sorted by path. Hidden entries are skipped.
pub fn model_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    collect(dir, &mut out)?;
    out.sort();
    Ok(out)
}

fn collect(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        if entry.file_name().to_string_lossy().starts_with('.') {
            continue;
        }
        if entry.file_type()?.is_dir() {
            collect(&path, out)?;
        } else if DocumentKind::from_path(&path).is_some() {
            out.push(path);
        }
    }
    Ok(())
}

/// Reads and parses the given files. Files of unknown kind are skipped.
pub fn load_documents(paths: &[PathBuf]) -> std::io::Result<ParseResult<Vec<Document>>> {
    let mut docs = Vec::new();
    let mut diags = Vec::new();
    for path in paths {
        let Some(kind) = DocumentKind::from_path(path) else {
            continue;
        };
        let bytes = std::fs::read(path)?;
        let r = parse_document_bytes(kind, &bytes, &path.display().to_string());
        diags.extend(r.diagnostics);
        docs.extend(r.document);
    }
    Ok(ParseResult::new(Some(docs), diags))
}

/// Parses the given documents and resolves them into one workspace.
pub fn load_workspace(paths: &[PathBuf]) -> std::io::Result<ParseResult<Workspace>> {
    let parsed = load_documents(paths)?;
    let Some(docs) = parsed.document else {
        return Ok(ParseResult::new(None, parsed.diagnostics));
    };
    let mut diags = parsed.diagnostics;
    match resolve_workspace(docs) {
        Ok(ws) => Ok(ParseResult::new(Some(ws), diags)),
        Err(errors) => {
            diags.extend(errors);
            Ok(ParseResult::new(None, diags))
        }
    }
}

/// Loads every model file below `dir` and resolves the workspace.
pub fn parse_workspace(dir: &Path) -> std::io::Result<ParseResult<Workspace>> {
    load_workspace(&model_files(dir)?)
}

/// The canonical file name of a document.
pub fn file_name(doc: &Document) -> String {
    format!("{}{}", doc.id(), doc.kind().extension())
}
