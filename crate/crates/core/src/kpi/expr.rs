//! Fitness expressions: numeric literals, `+ - * /`, parentheses and
//! aggregator calls `agg(metric, window)`.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | atom
//! atom   := NUMBER | "(" expr ")" | AGG "(" METRIC "," WINDOW ")"
//! AGG    := avg | sum | min | max | last | count
//! WINDOW := all | <positive integer>(s|m|h|d|w)
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::Identifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    Avg,
    Sum,
    Min,
    Max,
    Last,
    Count,
}

impl Aggregator {
    pub const ALL: [Aggregator; 6] = [
        Aggregator::Avg,
        Aggregator::Sum,
        Aggregator::Min,
        Aggregator::Max,
        Aggregator::Last,
        Aggregator::Count,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Aggregator::Avg => "avg",
            Aggregator::Sum => "sum",
            Aggregator::Min => "min",
            Aggregator::Max => "max",
            Aggregator::Last => "last",
            Aggregator::Count => "count",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.as_str() == s)
    }

    /// Applies the aggregator to a time-ordered series. `None` means no data,
    /// except for `count`, which is 0 on an empty series.
    pub fn apply(self, values: &[f64]) -> Option<f64> {
        if values.is_empty() {
            return (self == Aggregator::Count).then_some(0.0);
        }
        Some(match self {
            Aggregator::Avg => values.iter().sum::<f64>() / values.len() as f64,
            Aggregator::Sum => values.iter().sum(),
            Aggregator::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregator::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aggregator::Last => *values.last().unwrap(),
            Aggregator::Count => values.len() as f64,
        })
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimeUnit {
    Seconds,
    Minutes,
    Hours,
    Days,
    Weeks,
}

impl TimeUnit {
    fn suffix(self) -> char {
        match self {
            TimeUnit::Seconds => 's',
            TimeUnit::Minutes => 'm',
            TimeUnit::Hours => 'h',
            TimeUnit::Days => 'd',
            TimeUnit::Weeks => 'w',
        }
    }

    fn seconds(self) -> i64 {
        match self {
            TimeUnit::Seconds => 1,
            TimeUnit::Minutes => 60,
            TimeUnit::Hours => 3_600,
            TimeUnit::Days => 86_400,
            TimeUnit::Weeks => 604_800,
        }
    }
}

/// Look-back window of an aggregator. `Span` windows cover the half-open
/// interval `(as_of - span, as_of]`; `All` covers everything up to `as_of`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Window {
    All,
    Span { amount: u32, unit: TimeUnit },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed duration `{0}`: expected `all` or a positive integer followed by s, m, h, d or w")]
pub struct MalformedDuration(pub String);

impl Window {
    pub fn duration(self) -> Option<chrono::Duration> {
        match self {
            Window::All => None,
            Window::Span { amount, unit } => Some(chrono::Duration::seconds(i64::from(amount) * unit.seconds())),
        }
    }
}

impl FromStr for Window {
    type Err = MalformedDuration;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(Window::All);
        }
        let err = || MalformedDuration(s.to_string());
        let unit = match s.chars().last().ok_or_else(err)? {
            's' => TimeUnit::Seconds,
            'm' => TimeUnit::Minutes,
            'h' => TimeUnit::Hours,
            'd' => TimeUnit::Days,
            'w' => TimeUnit::Weeks,
            _ => return Err(err()),
        };
        let digits = &s[..s.len() - 1];
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let amount: u32 = digits.parse().map_err(|_| err())?;
        if amount == 0 {
            return Err(err());
        }
        Ok(Window::Span { amount, unit })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::All => f.write_str("all"),
            Window::Span { amount, unit } => write!(f, "{amount}{}", unit.suffix()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Neg(Box<Expr>),
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Aggregate {
        agg: Aggregator,
        metric: Identifier,
        window: Window,
    },
}

/// A parsed fitness function. Serializes as its canonical text.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessExpression {
    pub root: Expr,
}

impl FitnessExpression {
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        let mut p = ExprParser {
            src: text,
            pos: 0,
        };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(p.error(format!("unexpected `{}`", p.rest_preview())));
        }
        Ok(Self { root })
    }

    /// Metric ids referenced by aggregator calls, deduplicated and sorted.
    pub fn metrics(&self) -> BTreeSet<Identifier> {
        let mut out = BTreeSet::new();
        self.root.visit_aggregates(&mut |_, m, _| {
            out.insert(m.clone());
        });
        out
    }
}

impl Expr {
    pub fn visit_aggregates(&self, f: &mut dyn FnMut(Aggregator, &Identifier, Window)) {
        match self {
            Expr::Number(_) => {}
            Expr::Neg(inner) => inner.visit_aggregates(f),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.visit_aggregates(f);
                rhs.visit_aggregates(f);
            }
            Expr::Aggregate { agg, metric, window } => f(*agg, metric, *window),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Number(n) if *n < 0.0 || (*n == 0.0 && n.is_sign_negative()) => 3,
            _ => 4,
        }
    }

    fn write(&self, out: &mut String) {
        match self {
            Expr::Number(n) => out.push_str(&format_number(*n)),
            Expr::Neg(inner) => {
                out.push('-');
                if inner.precedence() < 4 {
                    out.push('(');
                    inner.write(out);
                    out.push(')');
                } else {
                    inner.write(out);
                }
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                let lparen = lhs.precedence() < p;
                // Left associative: an equal-precedence right operand needs
                // parentheses to keep its grouping.
                let rparen = rhs.precedence() <= p;
                wrap(out, lparen, |o| lhs.write(o));
                out.push(' ');
                out.push(op.symbol());
                out.push(' ');
                wrap(out, rparen, |o| rhs.write(o));
            }
            Expr::Aggregate { agg, metric, window } => {
                out.push_str(&format!("{agg}({metric}, {window})"));
            }
        }
    }
}

fn wrap(out: &mut String, paren: bool, f: impl FnOnce(&mut String)) {
    if paren {
        out.push('(');
    }
    f(out);
    if paren {
        out.push(')');
    }
}

/// Shortest text that parses back to exactly the same `f64`.
pub fn format_number(n: f64) -> String {
    // `Display` for f64 prints the shortest round-tripping decimal.
    format!("{n}")
}

impl fmt::Display for FitnessExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.root.write(&mut s);
        f.write_str(&s)
    }
}

impl Serialize for FitnessExpression {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FitnessExpression {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FitnessExpression::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("at offset {offset}: {source}")]
    Duration {
        offset: usize,
        #[source]
        source: MalformedDuration,
    },
}

impl ExprError {
    pub fn offset(&self) -> usize {
        match self {
            ExprError::Syntax { offset, .. } | ExprError::Duration { offset, .. } => *offset,
        }
    }
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn error(&self, message: String) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message,
        }
    }

    fn rest_preview(&self) -> String {
        self.src[self.pos..].chars().take(12).collect()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(_) => format!("`{}`", self.rest_preview()),
                None => "end of expression".to_string(),
            };
            Err(self.error(format!("expected `{c}`, found {found}")))
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '-'))
            .unwrap_or(rest.len());
        self.pos += len;
        &self.src[start..start + len]
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinaryOp::Add,
                Some('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinaryOp::Mul,
                Some('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
                // A minus directly before a literal folds into the literal.
                let n = self.number()?;
                return Ok(Expr::Number(-n));
            }
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn number(&mut self) -> Result<f64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = start;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &self.src[start..i];
        match text.parse::<f64>() {
            Ok(n) if n.is_finite() => {
                self.pos = i;
                Ok(n)
            }
            _ => Err(self.error(format!("invalid number `{text}`"))),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(Expr::Number(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let at = self.pos;
                let name = self.word();
                let agg = Aggregator::from_name(name).ok_or_else(|| ExprError::Syntax {
                    offset: at,
                    message: format!(
                        "unknown aggregator `{name}` (expected avg, sum, min, max, last or count)"
                    ),
                })?;
                self.expect('(')?;
                self.skip_ws();
                let metric_at = self.pos;
                let metric_text = self.word();
                let metric = Identifier::new(metric_text).map_err(|e| ExprError::Syntax {
                    offset: metric_at,
                    message: e.to_string(),
                })?;
                self.expect(',')?;
                self.skip_ws();
                let window_at = self.pos;
                let window_text = self.word();
                let window = window_text.parse().map_err(|source| ExprError::Duration {
                    offset: window_at,
                    source,
                })?;
                self.expect(')')?;
                Ok(Expr::Aggregate { agg, metric, window })
            }
            Some(_) => Err(self.error(format!("unexpected `{}`", self.rest_preview()))),
            None => Err(self.error("unexpected end of expression".to_string())),
        }
    }
}
