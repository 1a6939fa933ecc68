//! Domain types shared across the toolkit.

mod dm;
mod matrix;
mod sq;
mod workspace;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use dm::{
    canonicalize, Concern, ConcernKind, DecisionMap, Effect, EffectSource, Feature,
    SustainabilityGoal, Variant,
};
pub use matrix::DependencyMatrix;
pub use sq::{merge_sq, MetricSpec, SqEntry, SqModel};
pub use workspace::{
    resolve_workspace, ConcernSite, Document, DocumentKind, FeatureSite, MetricSite, Workspace,
};

pub const MAX_IDENTIFIER_LEN: usize = 64;

/// A lowercase slug used as the primary key of every model element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Identifier(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid identifier `{0}`: expected [a-z][a-z0-9_-]* of at most 64 characters")]
pub struct InvalidIdentifier(pub String);

impl Identifier {
    pub fn new(value: impl Into<String>) -> Result<Self, InvalidIdentifier> {
        let value = value.into();
        if Self::is_valid(&value) {
            Ok(Self(value))
        } else {
            Err(InvalidIdentifier(value))
        }
    }

    pub fn is_valid(s: &str) -> bool {
        let bytes = s.as_bytes();
        !bytes.is_empty()
            && bytes.len() <= MAX_IDENTIFIER_LEN
            && bytes[0].is_ascii_lowercase()
            && bytes
                .iter()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || *b == b'_' || *b == b'-')
    }

    /// Normalizes free text (e.g. a matrix header such as `Energy Efficiency`)
    /// into an identifier. Returns `None` when nothing usable remains.
    pub fn slugify(text: &str) -> Option<Self> {
        let mut out = String::new();
        for ch in text.trim().chars() {
            let ch = ch.to_ascii_lowercase();
            if ch.is_ascii_lowercase() || ch.is_ascii_digit() || ch == '-' || ch == '_' {
                out.push(ch);
            } else if !out.ends_with('_') {
                out.push('_');
            }
        }
        let trimmed = out.trim_matches('_');
        let start = trimmed.find(|c: char| c.is_ascii_lowercase())?;
        let mut slug: String = trimmed[start..].to_string();
        slug.truncate(MAX_IDENTIFIER_LEN);
        Self::new(slug.trim_end_matches('_')).ok()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Identifier {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Identifier {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl FromStr for Identifier {
    type Err = InvalidIdentifier;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl TryFrom<String> for Identifier {
    type Error = InvalidIdentifier;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Identifier> for String {
    fn from(id: Identifier) -> Self {
        id.0
    }
}

impl Serialize for Identifier {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Identifier {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Identifier::new(s).map_err(serde::de::Error::custom)
    }
}

/// A value outside one of the closed enumerations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{value}` is not a valid {kind} (expected one of: {})", expected.join(", "))]
pub struct EnumError {
    pub kind: &'static str,
    pub value: String,
    pub expected: &'static [&'static str],
}

macro_rules! closed_enum {
    (
        $(#[$meta:meta])*
        $name:ident, $kind:literal { $($variant:ident => $text:literal),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant,)+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant,)+];
            pub const NAMES: &'static [&'static str] = &[$($text,)+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text,)+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = EnumError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(EnumError { kind: $kind, value: s.to_string(), expected: Self::NAMES }),
                }
            }
        }
    };
}

closed_enum! {
    /// The four sustainability dimensions.
    Dimension, "dimension" {
        Technical => "technical",
        Economic => "economic",
        Social => "social",
        Environmental => "environmental",
    }
}

closed_enum! {
    /// Order of an impact over time. Variant order gives the ordinal:
    /// immediate < enabling < systemic.
    ImpactLevel, "impact level" {
        Immediate => "immediate",
        Enabling => "enabling",
        Systemic => "systemic",
    }
}

closed_enum! {
    EffectType, "effect type" {
        Positive => "positive",
        Negative => "negative",
        Undecided => "undecided",
    }
}

closed_enum! {
    MetricKind, "metric kind" {
        Internal => "internal",
        External => "external",
        QualityInUse => "quality_in_use",
    }
}

closed_enum! {
    /// A cell of a dependency matrix: `+`, `-` or `I`.
    DependencyValue, "dependency value" {
        Plus => "+",
        Minus => "-",
        Indeterminate => "I",
    }
}

impl EffectType {
    pub fn is_decided(self) -> bool {
        self != EffectType::Undecided
    }
}

impl DependencyValue {
    /// The effect type a matrix cell suggests.
    pub fn suggested_effect(self) -> EffectType {
        match self {
            DependencyValue::Plus => EffectType::Positive,
            DependencyValue::Minus => EffectType::Negative,
            DependencyValue::Indeterminate => EffectType::Undecided,
        }
    }

    /// True when a decided effect has the opposite sign of this cell.
    pub fn contradicts(self, effect: EffectType) -> bool {
        matches!(
            (self, effect),
            (DependencyValue::Plus, EffectType::Negative)
                | (DependencyValue::Minus, EffectType::Positive)
        )
    }
}
