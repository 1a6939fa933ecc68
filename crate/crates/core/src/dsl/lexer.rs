//! Tokenizer shared by the `.dm.saf`, `.kpi.saf` and `.arch.saf` grammars.

use crate::diag::{Code, Diagnostic, SourceLocation};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// A bare word: keyword, identifier or enumeration value.
    Word(String),
    Str(String),
    Number(f64),
    LBrace,
    RBrace,
    Arrow,
    Dot,
    Semi,
    Pipe,
    Cmp(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(_) => "a string".to_string(),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::Arrow => "`->`".to_string(),
            Tok::Dot => "`.`".to_string(),
            Tok::Semi => "`;`".to_string(),
            Tok::Pipe => "`|`".to_string(),
            Tok::Cmp(c) => format!("`{c}`"),
            Tok::Eof => "end of file".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub column: u32,
}

/// Splits `text` into tokens. Lexical errors become E100 diagnostics and the
/// offending character is skipped; the token list always ends with `Eof`.
pub fn tokenize(text: &str, file: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lx = Lexer {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        file,
        tokens: Vec::new(),
        diags: Vec::new(),
    };
    lx.run();
    (lx.tokens, lx.diags)
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
    file: &'a str,
    tokens: Vec<Token>,
    diags: Vec<Diagnostic>,
}

fn is_word_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

impl Lexer<'_> {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&mut self, line: u32, column: u32, message: String) {
        self.diags.push(
            Diagnostic::new(Code::E100, message).at(Some(SourceLocation::new(self.file, line, column))),
        );
    }

    fn push(&mut self, tok: Tok, line: u32, column: u32) {
        self.tokens.push(Token { tok, line, column });
    }

    fn run(&mut self) {
        while let Some(c) = self.peek(0) {
            let (line, column) = (self.line, self.column);
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '{' => {
                    self.bump();
                    self.push(Tok::LBrace, line, column);
                }
                '}' => {
                    self.bump();
                    self.push(Tok::RBrace, line, column);
                }
                '.' => {
                    self.bump();
                    self.push(Tok::Dot, line, column);
                }
                ';' => {
                    self.bump();
                    self.push(Tok::Semi, line, column);
                }
                '|' => {
                    self.bump();
                    self.push(Tok::Pipe, line, column);
                }
                '<' | '>' => {
                    self.bump();
                    let tok = if self.peek(0) == Some('=') {
                        self.bump();
                        if c == '<' { "<=" } else { ">=" }
                    } else if c == '<' {
                        "<"
                    } else {
                        ">"
                    };
                    self.push(Tok::Cmp(tok), line, column);
                }
                '-' if self.peek(1) == Some('>') => {
                    self.bump();
                    self.bump();
                    self.push(Tok::Arrow, line, column);
                }
                '-' if self.peek(1).is_some_and(|d| d.is_ascii_digit()) => self.number(line, column),
                c if c.is_ascii_digit() => self.number(line, column),
                '"' => self.string(line, column),
                c if is_word_start(c) => {
                    let mut w = String::new();
                    while let Some(c) = self.peek(0) {
                        // `a->b` must lex as three tokens.
                        if is_word_char(c) && !(c == '-' && self.peek(1) == Some('>')) {
                            w.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.push(Tok::Word(w), line, column);
                }
                other => {
                    self.bump();
                    self.error(line, column, format!("unexpected character `{}`", other.escape_debug()));
                }
            }
        }
        let (line, column) = (self.line, self.column);
        self.push(Tok::Eof, line, column);
    }

    fn number(&mut self, line: u32, column: u32) {
        let mut text = String::new();
        if self.peek(0) == Some('-') {
            text.push('-');
            self.bump();
        }
        while let Some(c) = self.peek(0) {
            if c.is_ascii_digit() || c == '.' {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let sign = matches!(self.peek(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..digit_at {
                    text.push(self.bump().unwrap());
                }
                while let Some(c) = self.peek(0) {
                    if c.is_ascii_digit() {
                        text.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
        }
        match text.parse::<f64>() {
            Ok(n) if n.is_finite() => self.push(Tok::Number(n), line, column),
            _ => self.error(line, column, format!("invalid number `{text}`")),
        }
    }

    fn string(&mut self, line: u32, column: u32) {
        self.bump();
        let mut s = String::new();
        loop {
            match self.peek(0) {
                None | Some('\n') => {
                    self.error(line, column, "unterminated string".to_string());
                    return;
                }
                Some('"') => {
                    self.bump();
                    break;
                }
                Some('\\') => {
                    let (el, ec) = (self.line, self.column);
                    self.bump();
                    match self.bump() {
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('r') => s.push('\r'),
                        Some(other) => {
                            self.error(el, ec, format!("unknown escape `\\{}`", other.escape_debug()));
                            if other == '\n' {
                                return;
                            }
                        }
                        None => {
                            self.error(line, column, "unterminated string".to_string());
                            return;
                        }
                    }
                }
                Some(c) => {
                    s.push(c);
                    self.bump();
                }
            }
        }
        self.push(Tok::Str(s), line, column);
    }
}

/// Quotes a string for the block grammars.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
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
