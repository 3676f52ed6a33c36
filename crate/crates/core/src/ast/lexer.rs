// SPDX-License-Identifier: Apache-2.0

//! Lossless tokenizer for Solidity source.
//!
//! Every byte of the input ends up either inside a token (comments included)
//! or in the whitespace between two tokens, so the token stream can be used
//! to reconstruct the file exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::span::{FileId, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    NumberLiteral,
    StringLiteral,
    Punctuation,
    Operator,
    Comment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text && self.kind != TokenKind::StringLiteral && self.kind != TokenKind::Comment
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct LexError {
    pub message: String,
    pub line: u32,
    pub column: u32,
}

pub const KEYWORDS: &[&str] = &[
    "abstract",
    "anonymous",
    "as",
    "assembly",
    "break",
    "calldata",
    "catch",
    "constant",
    "constructor",
    "continue",
    "contract",
    "delete",
    "do",
    "else",
    "emit",
    "enum",
    "error",
    "event",
    "external",
    "fallback",
    "false",
    "for",
    "from",
    "function",
    "if",
    "immutable",
    "import",
    "indexed",
    "interface",
    "internal",
    "is",
    "library",
    "mapping",
    "memory",
    "modifier",
    "new",
    "override",
    "payable",
    "pragma",
    "private",
    "public",
    "pure",
    "receive",
    "return",
    "returns",
    "storage",
    "struct",
    "true",
    "try",
    "type",
    "unchecked",
    "using",
    "view",
    "virtual",
    "while",
];

// Longest first so that a prefix never shadows a longer operator.
const OPERATORS: &[&str] = &[
    ">>>=", ">>>", "<<=", ">>=", "**", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "|=", "&=", "^=", "<<", ">>", "=>", "->", ":=", "=", "+", "-", "*", "/", "%",
    "<", ">", "!", "~", "&", "|", "^",
];

const PUNCTUATION: &[u8] = b"(){}[];,.?:";

pub fn is_keyword(text: &str) -> bool {
    KEYWORDS.binary_search(&text).is_ok()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    line_start: usize,
    file: FileId,
    out: Vec<Token>,
}

/// Split `source` into tokens. Comments are kept as [`TokenKind::Comment`].
pub fn tokenize(source: &str, file: FileId) -> Result<Vec<Token>, LexError> {
    let mut lx = Lexer {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        line: 1,
        line_start: 0,
        file,
        out: Vec::new(),
    };
    lx.run()?;
    Ok(lx.out)
}

impl<'a> Lexer<'a> {
    fn run(&mut self) -> Result<(), LexError> {
        while self.pos < self.bytes.len() {
            let c = self.peek_char();
            if c.is_whitespace() {
                self.bump_char();
                continue;
            }
            let start = self.pos;
            let start_line = self.line;
            let kind = self.lex_one(c, start_line)?;
            let end_line = if self.pos > start && self.bytes[self.pos - 1] == b'\n' {
                self.line - 1
            } else {
                self.line
            };
            self.out.push(Token {
                kind,
                text: self.src[start..self.pos].to_string(),
                span: Span::new(self.file, start, self.pos, start_line, end_line),
            });
        }
        Ok(())
    }

    fn lex_one(&mut self, c: char, start_line: u32) -> Result<TokenKind, LexError> {
        let rest = &self.bytes[self.pos..];
        if rest.starts_with(b"//") {
            while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                self.bump_char();
            }
            return Ok(TokenKind::Comment);
        }
        if rest.starts_with(b"/*") {
            let col = self.column();
            self.pos += 2;
            loop {
                if self.pos >= self.bytes.len() {
                    return Err(LexError {
                        message: "unterminated block comment".into(),
                        line: start_line,
                        column: col,
                    });
                }
                if self.bytes[self.pos..].starts_with(b"*/") {
                    self.pos += 2;
                    return Ok(TokenKind::Comment);
                }
                self.bump_char();
            }
        }
        if c == '"' || c == '\'' {
            self.string_body(c)?;
            return Ok(TokenKind::StringLiteral);
        }
        if c.is_ascii_digit() || (c == '.' && rest.get(1).is_some_and(|b| b.is_ascii_digit())) {
            self.number();
            return Ok(TokenKind::NumberLiteral);
        }
        if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let start = self.pos;
            while self.pos < self.bytes.len() {
                let b = self.bytes[self.pos];
                if b.is_ascii_alphanumeric() || b == b'_' || b == b'$' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            let word = &self.src[start..self.pos];
            if (word == "hex" || word == "unicode")
                && matches!(self.bytes.get(self.pos), Some(b'"') | Some(b'\''))
            {
                let q = self.bytes[self.pos] as char;
                self.string_body(q)?;
                return Ok(TokenKind::StringLiteral);
            }
            return Ok(if is_keyword(word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            });
        }
        if let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(op.as_bytes())) {
            self.pos += op.len();
            return Ok(TokenKind::Operator);
        }
        if PUNCTUATION.contains(&rest[0]) {
            self.pos += 1;
            return Ok(TokenKind::Punctuation);
        }
        Err(LexError {
            message: format!("unexpected character {c:?}"),
            line: self.line,
            column: self.column(),
        })
    }

    fn string_body(&mut self, quote: char) -> Result<(), LexError> {
        let line = self.line;
        let col = self.column();
        self.pos += 1;
        loop {
            match self.bytes.get(self.pos) {
                None | Some(b'\n') => {
                    return Err(LexError {
                        message: "unterminated string literal".into(),
                        line,
                        column: col,
                    })
                }
                Some(b'\\') => {
                    self.pos += 1;
                    if self.pos < self.bytes.len() {
                        self.bump_char();
                    }
                }
                Some(&b) if b as char == quote => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(_) => self.bump_char(),
            }
        }
    }

    fn number(&mut self) {
        let b = self.bytes;
        if b[self.pos..].starts_with(b"0x") || b[self.pos..].starts_with(b"0X") {
            self.pos += 2;
            while self.pos < b.len() && (b[self.pos].is_ascii_hexdigit() || b[self.pos] == b'_') {
                self.pos += 1;
            }
            return;
        }
        let digits = |lx: &mut Self| {
            while lx.pos < b.len() && (b[lx.pos].is_ascii_digit() || b[lx.pos] == b'_') {
                lx.pos += 1;
            }
        };
        digits(self);
        if self.pos < b.len()
            && b[self.pos] == b'.'
            && b.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
            digits(self);
        }
        if self.pos < b.len() && (b[self.pos] == b'e' || b[self.pos] == b'E') {
            let mut look = self.pos + 1;
            if b.get(look) == Some(&b'-') {
                look += 1;
            }
            if b.get(look).is_some_and(|c| c.is_ascii_digit()) {
                self.pos = look;
                digits(self);
            }
        }
    }

    fn peek_char(&self) -> char {
        self.src[self.pos..].chars().next().unwrap_or('\0')
    }

    fn bump_char(&mut self) {
        let c = self.peek_char();
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.line_start = self.pos;
        }
    }

    fn column(&self) -> u32 {
        self.src[self.line_start..self.pos].chars().count() as u32 + 1
    }
}
