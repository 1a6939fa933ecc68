//! Coded diagnostics shared by the parsers, the resolver and the rule engine.
//!
//! Every code carries its severity in its prefix: `E` codes are errors, `W`
//! codes warnings and `I` codes informational notes.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// A 1-based position inside a source file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceLocation {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl SourceLocation {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Self {
        Self {
            file: file.into(),
            line: line.max(1),
            column: column.max(1),
        }
    }

    pub fn start_of(file: &Path) -> Self {
        Self::new(file.display().to_string(), 1, 1)
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

/// Where a model element was read from.
///
/// Origins never take part in equality, ordering or hashing, so a document
/// built in memory compares equal to the same document parsed from text.
#[derive(Debug, Clone, Default)]
pub struct Origin(pub Option<SourceLocation>);

impl Origin {
    pub fn at(loc: SourceLocation) -> Self {
        Self(Some(loc))
    }

    pub fn location(&self) -> Option<&SourceLocation> {
        self.0.as_ref()
    }
}

impl PartialEq for Origin {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Origin {}

impl std::hash::Hash for Origin {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

/// Origins keyed by element id. Like [`Origin`], never part of equality.
#[derive(Debug, Clone)]
pub struct OriginMap<K>(pub std::collections::BTreeMap<K, Origin>);

impl<K> Default for OriginMap<K> {
    fn default() -> Self {
        Self(std::collections::BTreeMap::new())
    }
}

impl<K> PartialEq for OriginMap<K> {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl<K> Eq for OriginMap<K> {}

impl<K> std::ops::Deref for OriginMap<K> {
    type Target = std::collections::BTreeMap<K, Origin>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl<K> std::ops::DerefMut for OriginMap<K> {
    fn deref_mut(&mut self) -> &mut Self::Target {
        &mut self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

macro_rules! codes {
    ($($variant:ident => $doc:literal),* $(,)?) => {
        /// The closed catalog of diagnostic codes.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Code {
            $(#[doc = $doc] $variant,)*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => stringify!($variant),)*
                }
            }

            pub fn describe(self) -> &'static str {
                match self {
                    $(Code::$variant => $doc,)*
                }
            }
        }
    };
}

codes! {
    E001 => "unresolved reference",
    E002 => "duplicate identifier",
    E003 => "concern dimension or impact missing",
    E004 => "effect targets a feature",
    E005 => "effect source equals its target",
    E100 => "syntax error",
    E101 => "unknown keyword",
    E102 => "value outside its enumeration",
    E300 => "answers continue past a decision graph leaf",
    E401 => "unknown metric in fitness expression",
    E402 => "malformed duration",
    E403 => "division by zero during evaluation",
    E501 => "unknown trace subject",
    W101 => "effect contradicts dependency matrix",
    W102 => "effect flows to an earlier impact level",
    W103 => "isolated element",
    I201 => "undecided effect has a matrix cell",
    I202 => "decided effect on an indeterminate matrix cell",
    I203 => "SQ entry spans more than one dimension",
}

impl Code {
    pub fn severity(self) -> Severity {
        match self.as_str().as_bytes()[0] {
            b'E' => Severity::Error,
            b'W' => Severity::Warning,
            _ => Severity::Info,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Code {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Code::ALL
            .iter()
            .copied()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown diagnostic code `{s}`"))
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Code {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub message: String,
    pub location: Option<SourceLocation>,
    /// Element the diagnostic is about when no source position is known.
    pub element: Option<String>,
    pub related: Vec<String>,
}

impl Diagnostic {
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            location: None,
            element: None,
            related: Vec::new(),
        }
    }

    pub fn at(mut self, location: Option<SourceLocation>) -> Self {
        self.location = location;
        self
    }

    pub fn at_origin(self, origin: &Origin) -> Self {
        self.at(origin.0.clone())
    }

    pub fn on_element(mut self, id: impl Into<String>) -> Self {
        self.element = Some(id.into());
        self
    }

    pub fn with_related<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.related.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn severity(&self) -> Severity {
        self.code.severity()
    }

    pub fn is_error(&self) -> bool {
        self.severity() == Severity::Error
    }

    /// Sort key: file, line, code, then column and message as tie breakers.
    pub fn sort_key(&self) -> (String, u32, Code, u32, String) {
        let (file, line, column) = match &self.location {
            Some(l) => (l.file.clone(), l.line, l.column),
            None => (String::new(), 0, 0),
        };
        (file, line, self.code, column, self.message.clone())
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.location, &self.element) {
            (Some(loc), _) => write!(f, "{loc}: ")?,
            (None, Some(el)) => write!(f, "[{el}] ")?,
            (None, None) => {}
        }
        write!(f, "{} {}: {}", self.severity(), self.code, self.message)
    }
}

/// Wire shape: `{code, severity, message, file, line, column, related}`.
#[derive(Serialize, Deserialize)]
struct DiagnosticWire {
    code: Code,
    severity: Severity,
    message: String,
    file: Option<String>,
    line: Option<u32>,
    column: Option<u32>,
    related: Vec<String>,
}

impl Serialize for Diagnostic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut related = Vec::new();
        if let (None, Some(el)) = (&self.location, &self.element) {
            related.push(el.clone());
        }
        related.extend(self.related.iter().cloned());
        DiagnosticWire {
            code: self.code,
            severity: self.severity(),
            message: self.message.clone(),
            file: self.location.as_ref().map(|l| l.file.clone()),
            line: self.location.as_ref().map(|l| l.line),
            column: self.location.as_ref().map(|l| l.column),
            related,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Diagnostic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = DiagnosticWire::deserialize(d)?;
        let location = match (w.file, w.line, w.column) {
            (Some(file), Some(line), Some(column)) => Some(SourceLocation::new(file, line, column)),
            _ => None,
        };
        Ok(Diagnostic {
            code: w.code,
            message: w.message,
            location,
            element: None,
            related: w.related,
        })
    }
}

pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by_key(Diagnostic::sort_key);
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
