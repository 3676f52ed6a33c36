// SPDX-License-Identifier: Apache-2.0

//! Lexer, parser and syntax tree for the supported Solidity subset.

mod lexer;
mod nodes;
mod parser;
mod span;
pub mod visit;

pub use lexer::{is_keyword, tokenize, LexError, Token, TokenKind, KEYWORDS};
pub use nodes::*;
pub use parser::{parse_expression, parse_source_unit, parse_statement, ParseError};
pub use span::{line_col, slice_source, FileId, OutOfRange, Span};

/// JSON view of a parsed unit: every node carries `kind` and `span`.
pub fn to_json(unit: &SourceUnit) -> serde_json::Value {
    serde_json::to_value(unit).expect("syntax tree is always serializable")
}
