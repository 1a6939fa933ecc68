//! Token cursor with diagnostic helpers for the block grammars.

use std::str::FromStr;

use super::lexer::{tokenize, Tok, Token};
use crate::diag::{Code, Diagnostic, Origin, SourceLocation};
use crate::model::Identifier;

/// Signals that the current item could not be parsed; the diagnostic has
/// already been recorded.
#[derive(Debug)]
pub struct Abort;

pub type Step<T> = Result<T, Abort>;

pub struct Cursor<'a> {
    tokens: Vec<Token>,
    pos: usize,
    file: &'a str,
    pub diags: Vec<Diagnostic>,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &str, file: &'a str) -> Self {
        let (tokens, diags) = tokenize(text, file);
        Self { tokens, pos: 0, file, diags }
    }

    pub fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn is_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w == word)
    }

    pub fn location(&self) -> SourceLocation {
        let t = &self.tokens[self.pos];
        SourceLocation::new(self.file, t.line, t.column)
    }

    pub fn origin(&self) -> Origin {
        Origin::at(self.location())
    }

    pub fn advance(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    pub fn error_here(&mut self, code: Code, message: impl Into<String>) -> Abort {
        let loc = self.location();
        self.diags.push(Diagnostic::new(code, message).at(Some(loc)));
        Abort
    }

    pub fn expected(&mut self, what: &str) -> Abort {
        let found = self.peek().describe();
        self.error_here(Code::E100, format!("expected {what}, found {found}"))
    }

    pub fn keyword(&mut self, word: &str) -> Step<()> {
        if self.is_word(word) {
            self.advance();
            Ok(())
        } else {
            Err(self.expected(&format!("`{word}`")))
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Step<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.expected(&tok.describe()))
        }
    }

    pub fn string(&mut self) -> Step<String> {
        match self.peek() {
            Tok::Str(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.expected("a string")),
        }
    }

    pub fn number(&mut self) -> Step<f64> {
        match self.peek() {
            Tok::Number(n) => {
                let n = *n;
                self.advance();
                Ok(n)
            }
            _ => Err(self.expected("a number")),
        }
    }

    /// An identifier that must not collide with any of `reserved`.
    pub fn ident(&mut self, reserved: &[&str]) -> Step<Identifier> {
        match self.peek() {
            Tok::Word(w) if reserved.contains(&w.as_str()) => {
                let w = w.clone();
                Err(self.error_here(Code::E100, format!("`{w}` is a reserved word and cannot be used as an identifier")))
            }
            Tok::Word(w) => match Identifier::new(w.clone()) {
                Ok(id) => {
                    self.advance();
                    Ok(id)
                }
                Err(e) => Err(self.error_here(Code::E100, e.to_string())),
            },
            _ => Err(self.expected("an identifier")),
        }
    }

    /// One or more identifiers, stopping before any word in `stop` or any
    /// non-word token.
    pub fn ident_list(&mut self, stop: &[&str]) -> Step<Vec<Identifier>> {
        let mut out = vec![self.ident(stop)?];
        while matches!(self.peek(), Tok::Word(w) if !stop.contains(&w.as_str())) {
            out.push(self.ident(stop)?);
        }
        Ok(out)
    }

    /// A bare word parsed into a closed enumeration; failures are E102.
    pub fn enum_value<T>(&mut self, what: &str) -> Step<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.peek() {
            Tok::Word(w) => match w.parse::<T>() {
                Ok(v) => {
                    self.advance();
                    Ok(v)
                }
                Err(e) => Err(self.error_here(Code::E102, e.to_string())),
            },
            _ => Err(self.expected(what)),
        }
    }

    /// Skips to the next token that could start an item (a word in
    /// `item_keywords`), a closing brace, or the end of input.
    pub fn recover(&mut self, item_keywords: &[&str]) {
        // Always make progress past the token that failed.
        if !self.at_eof() && !matches!(self.peek(), Tok::RBrace) {
            self.advance();
        }
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace if depth == 0 => return,
                Tok::RBrace => depth -= 1,
                Tok::Word(w) if depth == 0 && item_keywords.contains(&w.as_str()) => return,
                _ => {}
            }
            self.advance();
        }
    }
}
