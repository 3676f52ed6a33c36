// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser over the comment-free token stream.
//!
//! Errors inside one contract body are contained: the parser records a
//! diagnostic, skips to the next top-level `contract`/`interface`/`library`
//! and keeps going. A unit fails as a whole only when nothing could be
//! recovered.

use std::fmt;

use thiserror::Error;

use super::lexer::{tokenize, LexError, Token, TokenKind};
use super::nodes::*;
use super::span::{line_col, FileId, Span};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub path: String,
    pub line: u32,
    pub column: u32,
    pub message: String,
    /// Tokens that would have been accepted at the failure point.
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.path, self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl ParseError {
    fn from_lex(path: &str, err: LexError) -> Self {
        ParseError {
            path: path.to_string(),
            line: err.line,
            column: err.column,
            message: err.message,
            expected: Vec::new(),
        }
    }
}

type PResult<T> = Result<T, ParseError>;

/// Keywords that the language only reserves in specific positions.
const CONTEXTUAL: &[&str] = &["from", "error", "receive", "fallback", "type"];

const UNITS: &[&str] = &[
    "wei", "gwei", "szabo", "finney", "ether", "seconds", "minutes", "hours", "days", "weeks",
    "years",
];

const ASSIGN_OPS: &[&str] = &[
    "=", "|=", "^=", "&=", "<<=", ">>=", ">>>=", "+=", "-=", "*=", "/=", "%=",
];

// Binary operators from loosest to tightest binding.
const BINARY_LEVELS: &[&[&str]] = &[
    &["||"],
    &["&&"],
    &["==", "!="],
    &["<", ">", "<=", ">="],
    &["|"],
    &["^"],
    &["&"],
    &["<<", ">>", ">>>"],
    &["+", "-"],
    &["*", "/", "%"],
];

/// Parse one Solidity file.
pub fn parse_source_unit(source: &str, path: &str, file: FileId) -> PResult<SourceUnit> {
    let mut p = Parser::new(source, path, file)?;
    p.source_unit()
}

/// Parse `source` as exactly one statement.
pub fn parse_statement(source: &str, file: FileId) -> PResult<Statement> {
    let mut p = Parser::new(source, "<statement>", file)?;
    let stmt = p.statement()?;
    p.expect_eof()?;
    Ok(stmt)
}

/// Parse `source` as exactly one expression.
pub fn parse_expression(source: &str, file: FileId) -> PResult<Expression> {
    let mut p = Parser::new(source, "<expression>", file)?;
    let expr = p.expression()?;
    p.expect_eof()?;
    Ok(expr)
}

struct Parser<'a> {
    src: &'a str,
    path: String,
    file: FileId,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, path: &str, file: FileId) -> PResult<Self> {
        let toks = tokenize(src, file)
            .map_err(|e| ParseError::from_lex(path, e))?
            .into_iter()
            .filter(|t| t.kind != TokenKind::Comment)
            .collect();
        Ok(Parser {
            src,
            path: path.to_string(),
            file,
            toks,
            pos: 0,
        })
    }

    // ---- token helpers ----

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.toks.get(self.pos + n)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn at_n(&self, n: usize, text: &str) -> bool {
        self.peek_at(n).is_some_and(|t| t.is(text))
    }

    fn eat(&mut self, text: &str) -> Option<Span> {
        if self.at(text) {
            let span = self.toks[self.pos].span;
            self.pos += 1;
            Some(span)
        } else {
            None
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        t
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos - 1].span
    }

    fn eof_span(&self) -> Span {
        let line = line_col(self.src, self.src.len()).0;
        Span::new(self.file, self.src.len(), self.src.len(), line, line)
    }

    fn current_span(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or_else(|| self.eof_span())
    }

    fn error_at(&self, span: Span, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let (line, column) = line_col(self.src, span.start);
        ParseError {
            path: self.path.clone(),
            line,
            column,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let found = match self.peek() {
            Some(t) => format!("unexpected `{}`", t.text),
            None => "unexpected end of input".to_string(),
        };
        self.error_at(self.current_span(), found, expected)
    }

    fn expect(&mut self, text: &str) -> PResult<Span> {
        self.eat(text).ok_or_else(|| self.unexpected(&[text]))
    }

    fn expect_eof(&self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected(&["end of input"])),
        }
    }

    fn is_ident_token(t: &Token) -> bool {
        t.kind == TokenKind::Identifier
            || (t.kind == TokenKind::Keyword && CONTEXTUAL.contains(&t.text.as_str()))
    }

    fn at_ident(&self) -> bool {
        self.peek().is_some_and(Self::is_ident_token)
    }

    fn expect_ident(&mut self) -> PResult<(String, Span)> {
        if self.at_ident() {
            let t = self.bump();
            Ok((t.text, t.span))
        } else {
            Err(self.unexpected(&["identifier"]))
        }
    }

    /// `A.B.C` as a single dotted name.
    fn path_name(&mut self) -> PResult<(String, Span)> {
        let (mut name, mut span) = self.expect_ident()?;
        while self.at(".") && self.peek_at(1).is_some_and(Self::is_ident_token) {
            self.pos += 1;
            let (next, s) = self.expect_ident()?;
            name.push('.');
            name.push_str(&next);
            span = span.to(s);
        }
        Ok((name, span))
    }

    fn text(&self, span: Span) -> &'a str {
        &self.src[span.start..span.end]
    }

    /// Skip one balanced item: stops after a `;` or a closing `}` at depth 0.
    fn skip_item(&mut self) -> Span {
        let start = self.current_span();
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            let text = t.text.clone();
            let is_structural = t.kind == TokenKind::Punctuation;
            self.pos += 1;
            if !is_structural {
                continue;
            }
            match text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" => depth = depth.saturating_sub(1),
                "}" => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        break;
                    }
                }
                ";" if depth == 0 => break,
                _ => {}
            }
        }
        start.to(self.prev_span())
    }

    fn diagnostic(&self, span: Span, message: String) -> Diagnostic {
        let (line, column) = line_col(self.src, span.start);
        Diagnostic {
            line,
            column,
            message,
        }
    }

    // ---- source unit ----

    fn source_unit(&mut self) -> PResult<SourceUnit> {
        let mut unit = SourceUnit {
            path: self.path.clone(),
            file: self.file,
            pragmas: Vec::new(),
            imports: Vec::new(),
            contracts: Vec::new(),
            structs: Vec::new(),
            enums: Vec::new(),
            errors: Vec::new(),
            events: Vec::new(),
            user_types: Vec::new(),
            diagnostics: Vec::new(),
            span: Span::new(
                self.file,
                0,
                self.src.len(),
                1,
                line_col(self.src, self.src.len()).0,
            ),
        };
        let mut first_error: Option<ParseError> = None;
        while let Some(tok) = self.peek() {
            let start = tok.span;
            let word = tok.text.clone();
            let kind = tok.kind;
            let result: PResult<()> = match (kind, word.as_str()) {
                (TokenKind::Keyword, "pragma") => self.pragma().map(|p| unit.pragmas.push(p)),
                (TokenKind::Keyword, "import") => self.import().map(|i| unit.imports.push(i)),
                (TokenKind::Keyword, "abstract" | "contract" | "interface" | "library") => {
                    match self.contract() {
                        Ok(c) => {
                            unit.contracts.push(c);
                            Ok(())
                        }
                        Err(e) => {
                            unit.diagnostics.push(Diagnostic {
                                line: e.line,
                                column: e.column,
                                message: format!("contract skipped: {}", e.message),
                            });
                            first_error.get_or_insert(e);
                            self.recover_to_next_contract(start);
                            Ok(())
                        }
                    }
                }
                (TokenKind::Keyword, "struct") => self.struct_def().map(|s| unit.structs.push(s)),
                (TokenKind::Keyword, "enum") => self.enum_def().map(|e| unit.enums.push(e)),
                (TokenKind::Keyword, "event") => self.event_def().map(|e| unit.events.push(e)),
                (TokenKind::Keyword, "error") if self.at_n(2, "(") => {
                    self.error_def().map(|e| unit.errors.push(e))
                }
                (TokenKind::Keyword, "type") if self.at_n(2, "is") => {
                    self.user_type().map(|n| unit.user_types.push(n))
                }
                (TokenKind::Punctuation, ";") => {
                    self.pos += 1;
                    Ok(())
                }
                _ => {
                    let span = self.skip_item();
                    let d = self.diagnostic(
                        span,
                        format!("unsupported top-level construct starting with `{word}` skipped"),
                    );
                    unit.diagnostics.push(d);
                    Ok(())
                }
            };
            if let Err(e) = result {
                unit.diagnostics.push(Diagnostic {
                    line: e.line,
                    column: e.column,
                    message: e.message.clone(),
                });
                first_error.get_or_insert(e);
                self.pos = self.pos.max(self.index_of(start) + 1);
                self.skip_to_top_level_start();
            }
        }
        match first_error {
            Some(e) if unit.contracts.is_empty() => Err(e),
            _ => Ok(unit),
        }
    }

    fn index_of(&self, span: Span) -> usize {
        self.toks
            .iter()
            .position(|t| t.span == span)
            .unwrap_or(self.pos)
    }

    fn recover_to_next_contract(&mut self, start: Span) {
        self.pos = self.index_of(start) + 1;
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Keyword
                && matches!(
                    t.text.as_str(),
                    "contract" | "interface" | "library" | "abstract"
                )
            {
                // `abstract contract`: do not stop on the `contract` half.
                if t.text == "contract" && self.pos > 0 && self.toks[self.pos - 1].is("abstract") {
                    self.pos += 1;
                    continue;
                }
                break;
            }
            self.pos += 1;
        }
    }

    fn skip_to_top_level_start(&mut self) {
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Keyword
                && matches!(
                    t.text.as_str(),
                    "contract" | "interface" | "library" | "abstract" | "pragma" | "import"
                )
            {
                break;
            }
            self.pos += 1;
        }
    }

    fn pragma(&mut self) -> PResult<PragmaDirective> {
        let start = self.expect("pragma")?;
        let body_start = self.current_span();
        while !self.at(";") {
            if self.peek().is_none() {
                return Err(self.unexpected(&[";"]));
            }
            self.pos += 1;
        }
        let text = if self.prev_span().end > body_start.start && self.pos > 0 {
            self.src[body_start.start..self.prev_span().end].to_string()
        } else {
            String::new()
        };
        let end = self.expect(";")?;
        Ok(PragmaDirective {
            text,
            span: start.to(end),
        })
    }

    fn string_literal_text(&mut self) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::StringLiteral => {
                let t = self.bump();
                Ok(t.text[1..t.text.len() - 1].to_string())
            }
            _ => Err(self.unexpected(&["string literal"])),
        }
    }

    fn import(&mut self) -> PResult<ImportDirective> {
        let start = self.expect("import")?;
        let mut unit_alias = None;
        let mut symbols = Vec::new();
        let path;
        if self.peek().is_some_and(|t| t.kind == TokenKind::StringLiteral) {
            path = self.string_literal_text()?;
            if self.eat("as").is_some() {
                unit_alias = Some(self.expect_ident()?.0);
            }
        } else if self.eat("*").is_some() {
            self.expect("as")?;
            unit_alias = Some(self.expect_ident()?.0);
            self.expect("from")?;
            path = self.string_literal_text()?;
        } else if self.eat("{").is_some() {
            loop {
                let name = self.expect_ident()?.0;
                let alias = if self.eat("as").is_some() {
                    Some(self.expect_ident()?.0)
                } else {
                    None
                };
                symbols.push(ImportSymbol { name, alias });
                if self.eat(",").is_none() {
                    break;
                }
            }
            self.expect("}")?;
            self.expect("from")?;
            path = self.string_literal_text()?;
        } else if self.at_ident() {
            unit_alias = Some(self.expect_ident()?.0);
            self.expect("from")?;
            path = self.string_literal_text()?;
        } else {
            return Err(self.unexpected(&["string literal", "*", "{"]));
        }
        let end = self.expect(";")?;
        Ok(ImportDirective {
            path,
            unit_alias,
            symbols,
            span: start.to(end),
        })
    }

    // ---- contracts ----

    fn contract(&mut self) -> PResult<ContractDefinition> {
        let start = self.current_span();
        let contract_kind = if self.eat("abstract").is_some() {
            self.expect("contract")?;
            ContractKind::AbstractContract
        } else if self.eat("contract").is_some() {
            ContractKind::Contract
        } else if self.eat("interface").is_some() {
            ContractKind::Interface
        } else {
            self.expect("library")?;
            ContractKind::Library
        };
        let name = self.expect_ident()?.0;
        let mut bases = Vec::new();
        if self.eat("is").is_some() {
            loop {
                let (base, span) = self.path_name()?;
                let mut arguments = Vec::new();
                let mut span = span;
                if self.at("(") {
                    let (args, _, s) = self.call_arguments()?;
                    arguments = args;
                    span = span.to(s);
                }
                bases.push(InheritanceSpecifier {
                    name: base,
                    arguments,
                    span,
                });
                if self.eat(",").is_none() {
                    break;
                }
            }
        }
        self.expect("{")?;
        let mut c = ContractDefinition {
            name,
            contract_kind,
            bases,
            state_variables: Vec::new(),
            functions: Vec::new(),
            modifiers: Vec::new(),
            events: Vec::new(),
            structs: Vec::new(),
            enums: Vec::new(),
            errors: Vec::new(),
            using_for: Vec::new(),
            user_types: Vec::new(),
            span: start,
        };
        loop {
            let Some(tok) = self.peek() else {
                return Err(self.unexpected(&["}"]));
            };
            match (tok.kind, tok.text.as_str()) {
                (TokenKind::Punctuation, "}") => break,
                (TokenKind::Punctuation, ";") => {
                    self.pos += 1;
                }
                (TokenKind::Keyword, "function" | "constructor" | "fallback" | "receive")
                    if !(tok.text == "receive" || tok.text == "fallback")
                        || self.at_n(1, "(") =>
                {
                    c.functions.push(self.function()?)
                }
                (TokenKind::Keyword, "modifier") => c.modifiers.push(self.modifier_def()?),
                (TokenKind::Keyword, "event") => c.events.push(self.event_def()?),
                (TokenKind::Keyword, "struct") => c.structs.push(self.struct_def()?),
                (TokenKind::Keyword, "enum") => c.enums.push(self.enum_def()?),
                (TokenKind::Keyword, "error") if self.at_n(2, "(") => {
                    c.errors.push(self.error_def()?)
                }
                (TokenKind::Keyword, "using") => c.using_for.push(self.using_for()?),
                (TokenKind::Keyword, "type") if self.at_n(2, "is") => {
                    c.user_types.push(self.user_type()?)
                }
                _ => c.state_variables.push(self.state_variable()?),
            }
        }
        let end = self.expect("}")?;
        c.span = start.to(end);
        Ok(c)
    }

    fn user_type(&mut self) -> PResult<String> {
        self.expect("type")?;
        let name = self.expect_ident()?.0;
        self.expect("is")?;
        self.type_name()?;
        self.expect(";")?;
        Ok(name)
    }

    fn using_for(&mut self) -> PResult<UsingFor> {
        let start = self.expect("using")?;
        let library = if self.at("{") {
            let open = self.current_span();
            let mut depth = 0;
            loop {
                let t = self.peek().ok_or_else(|| self.unexpected(&["}"]))?;
                if t.is("{") {
                    depth += 1;
                } else if t.is("}") {
                    depth -= 1;
                }
                self.pos += 1;
                if depth == 0 {
                    break;
                }
            }
            self.text(open.to(self.prev_span())).to_string()
        } else {
            self.path_name()?.0
        };
        self.expect("for")?;
        let target = if self.eat("*").is_some() {
            None
        } else {
            Some(self.type_name()?)
        };
        if self.at("global") {
            self.pos += 1;
        }
        let end = self.expect(";")?;
        Ok(UsingFor {
            library,
            target,
            span: start.to(end),
        })
    }

    fn state_variable(&mut self) -> PResult<StateVariable> {
        let type_name = self.type_name()?;
        let start = type_name.span();
        let mut visibility = Visibility::Unspecified;
        let mut constant = false;
        let mut immutable = false;
        loop {
            if self.eat("public").is_some() {
                visibility = Visibility::Public;
            } else if self.eat("private").is_some() {
                visibility = Visibility::Private;
            } else if self.eat("internal").is_some() {
                visibility = Visibility::Internal;
            } else if self.eat("constant").is_some() {
                constant = true;
            } else if self.eat("immutable").is_some() {
                immutable = true;
            } else if self.at("override") {
                self.override_specifier()?;
            } else if self.at("transient") && self.peek_at(1).is_some_and(Self::is_ident_token) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = self.expect_ident()?.0;
        let initial_value = if self.eat("=").is_some() {
            Some(self.expression()?)
        } else {
            None
        };
        let end = self.expect(";")?;
        Ok(StateVariable {
            type_name,
            name,
            visibility,
            constant,
            immutable,
            initial_value,
            span: start.to(end),
        })
    }

    fn override_specifier(&mut self) -> PResult<()> {
        self.expect("override")?;
        if self.eat("(").is_some() {
            if !self.at(")") {
                loop {
                    self.path_name()?;
                    if self.eat(",").is_none() {
                        break;
                    }
                }
            }
            self.expect(")")?;
        }
        Ok(())
    }

    fn parameter_list(&mut self, allow_indexed: bool) -> PResult<Vec<VariableDeclaration>> {
        self.expect("(")?;
        let mut params = Vec::new();
        if self.eat(")").is_some() {
            return Ok(params);
        }
        loop {
            params.push(self.parameter(allow_indexed)?);
            if self.eat(",").is_none() {
                break;
            }
        }
        self.expect(")")?;
        Ok(params)
    }

    fn data_location(&mut self) -> Option<(DataLocation, Span)> {
        let loc = match self.peek()?.text.as_str() {
            "memory" => DataLocation::Memory,
            "storage" => DataLocation::Storage,
            "calldata" => DataLocation::Calldata,
            _ => return None,
        };
        if self.peek()?.kind != TokenKind::Keyword {
            return None;
        }
        let span = self.bump().span;
        Some((loc, span))
    }

    fn parameter(&mut self, allow_indexed: bool) -> PResult<VariableDeclaration> {
        let type_name = self.type_name()?;
        let mut span = type_name.span();
        let mut location = None;
        let mut indexed = false;
        if let Some((loc, s)) = self.data_location() {
            location = Some(loc);
            span = span.to(s);
        }
        if allow_indexed {
            if let Some(s) = self.eat("indexed") {
                indexed = true;
                span = span.to(s);
            }
        }
        let name = if self.at_ident() {
            let (n, s) = self.expect_ident()?;
            span = span.to(s);
            Some(n)
        } else {
            None
        };
        Ok(VariableDeclaration {
            type_name,
            location,
            name,
            indexed,
            span,
        })
    }

    fn function(&mut self) -> PResult<FunctionDefinition> {
        let start = self.current_span();
        let head = self.bump();
        let (function_kind, name) = match head.text.as_str() {
            "constructor" => (FunctionKind::Constructor, String::new()),
            "fallback" => (FunctionKind::Fallback, String::new()),
            "receive" => (FunctionKind::Receive, String::new()),
            _ => {
                if self.at("(") {
                    // pre-0.6 unnamed fallback
                    (FunctionKind::Fallback, String::new())
                } else {
                    let (n, _) = self.expect_ident()?;
                    let kind = match n.as_str() {
                        "fallback" => FunctionKind::Fallback,
                        "receive" => FunctionKind::Receive,
                        _ => FunctionKind::Function,
                    };
                    (kind, if kind == FunctionKind::Function { n } else { String::new() })
                }
            }
        };
        let parameters = self.parameter_list(false)?;
        let mut visibility = Visibility::Unspecified;
        let mut mutability = Mutability::Nonpayable;
        let mut is_virtual = false;
        let mut overrides = false;
        let mut modifiers = Vec::new();
        let mut returns = Vec::new();
        loop {
            let Some(t) = self.peek() else {
                return Err(self.unexpected(&["{", ";"]));
            };
            match t.text.as_str() {
                "public" => visibility = Visibility::Public,
                "external" => visibility = Visibility::External,
                "internal" => visibility = Visibility::Internal,
                "private" => visibility = Visibility::Private,
                "pure" => mutability = Mutability::Pure,
                "view" | "constant" => mutability = Mutability::View,
                "payable" => mutability = Mutability::Payable,
                "virtual" => is_virtual = true,
                "override" => {
                    self.override_specifier()?;
                    overrides = true;
                    continue;
                }
                "returns" => {
                    self.pos += 1;
                    returns = self.parameter_list(false)?;
                    continue;
                }
                "{" | ";" => break,
                _ if Self::is_ident_token(t) => {
                    modifiers.push(self.modifier_invocation()?);
                    continue;
                }
                _ => {
                    return Err(self.unexpected(&["function attribute", "returns", "{", ";"]));
                }
            }
            self.pos += 1;
        }
        let (body, end) = if let Some(end) = self.eat(";") {
            (None, end)
        } else {
            let block = self.block()?;
            let end = block.span;
            (Some(block), end)
        };
        Ok(FunctionDefinition {
            name,
            function_kind,
            parameters,
            returns,
            visibility,
            mutability,
            is_virtual,
            overrides,
            modifiers,
            body,
            span: start.to(end),
        })
    }

    fn modifier_invocation(&mut self) -> PResult<ModifierInvocation> {
        let (name, mut span) = self.path_name()?;
        let arguments = if self.at("(") {
            let (args, _, s) = self.call_arguments()?;
            span = span.to(s);
            Some(args)
        } else {
            None
        };
        Ok(ModifierInvocation {
            name,
            arguments,
            span,
        })
    }

    fn modifier_def(&mut self) -> PResult<ModifierDefinition> {
        let start = self.expect("modifier")?;
        let name = self.expect_ident()?.0;
        let parameters = if self.at("(") {
            self.parameter_list(false)?
        } else {
            Vec::new()
        };
        let mut is_virtual = false;
        let mut overrides = false;
        loop {
            if self.eat("virtual").is_some() {
                is_virtual = true;
            } else if self.at("override") {
                self.override_specifier()?;
                overrides = true;
            } else {
                break;
            }
        }
        let (body, end) = if let Some(end) = self.eat(";") {
            (None, end)
        } else {
            let b = self.block()?;
            let end = b.span;
            (Some(b), end)
        };
        Ok(ModifierDefinition {
            name,
            parameters,
            is_virtual,
            overrides,
            body,
            span: start.to(end),
        })
    }

    fn event_def(&mut self) -> PResult<EventDefinition> {
        let start = self.expect("event")?;
        let name = self.expect_ident()?.0;
        let parameters = self.parameter_list(true)?;
        let anonymous = self.eat("anonymous").is_some();
        let end = self.expect(";")?;
        Ok(EventDefinition {
            name,
            parameters,
            anonymous,
            span: start.to(end),
        })
    }

    fn error_def(&mut self) -> PResult<ErrorDefinition> {
        let start = self.expect("error")?;
        let name = self.expect_ident()?.0;
        let parameters = self.parameter_list(false)?;
        let end = self.expect(";")?;
        Ok(ErrorDefinition {
            name,
            parameters,
            span: start.to(end),
        })
    }

    fn struct_def(&mut self) -> PResult<StructDefinition> {
        let start = self.expect("struct")?;
        let name = self.expect_ident()?.0;
        self.expect("{")?;
        let mut members = Vec::new();
        while !self.at("}") {
            let type_name = self.type_name()?;
            let (n, s) = self.expect_ident()?;
            let end = self.expect(";")?;
            let span = type_name.span().to(s).to(end);
            members.push(VariableDeclaration {
                type_name,
                location: None,
                name: Some(n),
                indexed: false,
                span,
            });
        }
        let end = self.expect("}")?;
        Ok(StructDefinition {
            name,
            members,
            span: start.to(end),
        })
    }

    fn enum_def(&mut self) -> PResult<EnumDefinition> {
        let start = self.expect("enum")?;
        let name = self.expect_ident()?.0;
        self.expect("{")?;
        let mut values = Vec::new();
        while !self.at("}") {
            values.push(self.expect_ident()?.0);
            if self.eat(",").is_none() {
                break;
            }
        }
        let end = self.expect("}")?;
        Ok(EnumDefinition {
            name,
            values,
            span: start.to(end),
        })
    }

    // ---- types ----

    fn type_name(&mut self) -> PResult<TypeName> {
        let mut ty = self.base_type()?;
        while self.at("[") {
            self.pos += 1;
            let length = if self.at("]") {
                None
            } else {
                Some(Box::new(self.expression()?))
            };
            let end = self.expect("]")?;
            let span = ty.span().to(end);
            ty = TypeName::Array {
                base: Box::new(ty),
                length,
                span,
            };
        }
        Ok(ty)
    }

    fn base_type(&mut self) -> PResult<TypeName> {
        if let Some(start) = self.eat("mapping") {
            self.expect("(")?;
            let key = self.type_name()?;
            if self.at_ident() {
                self.pos += 1;
            }
            self.expect("=>")?;
            let value = self.type_name()?;
            if self.at_ident() {
                self.pos += 1;
            }
            let end = self.expect(")")?;
            return Ok(TypeName::Mapping {
                key: Box::new(key),
                value: Box::new(value),
                span: start.to(end),
            });
        }
        if let Some(start) = self.eat("function") {
            self.parameter_list(false)?;
            while let Some(t) = self.peek() {
                if matches!(
                    t.text.as_str(),
                    "internal" | "external" | "pure" | "view" | "payable"
                ) && t.kind == TokenKind::Keyword
                {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if self.eat("returns").is_some() {
                self.parameter_list(false)?;
            }
            let span = start.to(self.prev_span());
            return Ok(TypeName::FunctionType {
                text: self.text(span).to_string(),
                span,
            });
        }
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier && is_elementary_type(&t.text) => {
                let t = self.bump();
                let mut span = t.span;
                let mut payable = false;
                if t.text == "address" {
                    if let Some(s) = self.eat("payable") {
                        payable = true;
                        span = span.to(s);
                    }
                }
                Ok(TypeName::Elementary {
                    name: t.text,
                    payable,
                    span,
                })
            }
            Some(t) if Self::is_ident_token(t) => {
                let (path, span) = self.path_name()?;
                Ok(TypeName::UserDefined { path, span })
            }
            _ => Err(self.unexpected(&["type name"])),
        }
    }

    // ---- statements ----

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect("{")?;
        let mut statements = Vec::new();
        while !self.at("}") {
            if self.peek().is_none() {
                return Err(self.unexpected(&["}"]));
            }
            statements.push(self.statement()?);
        }
        let end = self.expect("}")?;
        Ok(Block {
            statements,
            span: start.to(end),
        })
    }

    fn statement(&mut self) -> PResult<Statement> {
        let Some(tok) = self.peek() else {
            return Err(self.unexpected(&["statement"]));
        };
        let kw = tok.kind == TokenKind::Keyword;
        match tok.text.as_str() {
            "{" if tok.kind == TokenKind::Punctuation => {
                let b = self.block()?;
                Ok(Statement::Block {
                    statements: b.statements,
                    span: b.span,
                })
            }
            "unchecked" if kw => {
                let start = self.bump().span;
                let b = self.block()?;
                Ok(Statement::Unchecked {
                    statements: b.statements,
                    span: start.to(b.span),
                })
            }
            "if" if kw => self.if_statement(),
            "for" if kw => self.for_statement(),
            "while" if kw => {
                let start = self.bump().span;
                self.expect("(")?;
                let condition = self.expression()?;
                self.expect(")")?;
                let body = self.statement()?;
                let span = start.to(body.span());
                Ok(Statement::While {
                    condition,
                    body: Box::new(body),
                    span,
                })
            }
            "do" if kw => {
                let start = self.bump().span;
                let body = self.statement()?;
                self.expect("while")?;
                self.expect("(")?;
                let condition = self.expression()?;
                self.expect(")")?;
                let end = self.expect(";")?;
                Ok(Statement::DoWhile {
                    body: Box::new(body),
                    condition,
                    span: start.to(end),
                })
            }
            "return" if kw => {
                let start = self.bump().span;
                let expression = if self.at(";") {
                    None
                } else {
                    Some(self.expression()?)
                };
                let end = self.expect(";")?;
                Ok(Statement::Return {
                    expression,
                    span: start.to(end),
                })
            }
            "emit" if kw => {
                let start = self.bump().span;
                let event_call = self.expression()?;
                let end = self.expect(";")?;
                Ok(Statement::Emit {
                    event_call,
                    span: start.to(end),
                })
            }
            "revert"
                if tok.kind == TokenKind::Identifier
                    && self.peek_at(1).is_some_and(Self::is_ident_token) =>
            {
                let start = self.bump().span;
                let error_call = self.expression()?;
                let end = self.expect(";")?;
                Ok(Statement::Revert {
                    error_call,
                    span: start.to(end),
                })
            }
            "try" if kw => self.try_statement(),
            "break" if kw => {
                let start = self.bump().span;
                let end = self.expect(";")?;
                Ok(Statement::Break {
                    span: start.to(end),
                })
            }
            "continue" if kw => {
                let start = self.bump().span;
                let end = self.expect(";")?;
                Ok(Statement::Continue {
                    span: start.to(end),
                })
            }
            "assembly" if kw => self.assembly(),
            "_" if tok.kind == TokenKind::Identifier && self.at_n(1, ";") => {
                let start = self.bump().span;
                let end = self.expect(";")?;
                Ok(Statement::Placeholder {
                    span: start.to(end),
                })
            }
            _ => {
                let stmt = self.simple_statement()?;
                let end = self.expect(";")?;
                Ok(extend_simple(stmt, end))
            }
        }
    }

    fn if_statement(&mut self) -> PResult<Statement> {
        let start = self.expect("if")?;
        self.expect("(")?;
        let condition = self.expression()?;
        self.expect(")")?;
        let true_body = self.statement()?;
        let mut span = start.to(true_body.span());
        let false_body = if self.eat("else").is_some() {
            let s = self.statement()?;
            span = span.to(s.span());
            Some(Box::new(s))
        } else {
            None
        };
        Ok(Statement::If {
            condition,
            true_body: Box::new(true_body),
            false_body,
            span,
        })
    }

    fn for_statement(&mut self) -> PResult<Statement> {
        let start = self.expect("for")?;
        self.expect("(")?;
        let init = if self.at(";") {
            self.pos += 1;
            None
        } else {
            let s = self.simple_statement()?;
            let end = self.expect(";")?;
            Some(Box::new(extend_simple(s, end)))
        };
        let condition = if self.at(";") {
            None
        } else {
            Some(self.expression()?)
        };
        self.expect(";")?;
        let update = if self.at(")") {
            None
        } else {
            Some(self.expression()?)
        };
        self.expect(")")?;
        let body = self.statement()?;
        let span = start.to(body.span());
        Ok(Statement::For {
            init,
            condition,
            update,
            body: Box::new(body),
            span,
        })
    }

    fn try_statement(&mut self) -> PResult<Statement> {
        let start = self.expect("try")?;
        let expression = self.expression()?;
        let returns = if self.eat("returns").is_some() {
            self.parameter_list(false)?
        } else {
            Vec::new()
        };
        let body = self.block()?;
        let mut span = start.to(body.span);
        let mut catch_clauses = Vec::new();
        while let Some(cstart) = self.eat("catch") {
            let identifier = if self.at_ident() {
                Some(self.expect_ident()?.0)
            } else {
                None
            };
            let parameters = if self.at("(") {
                self.parameter_list(false)?
            } else {
                Vec::new()
            };
            let cbody = self.block()?;
            let cspan = cstart.to(cbody.span);
            span = span.to(cspan);
            catch_clauses.push(CatchClause {
                identifier,
                parameters,
                body: cbody,
                span: cspan,
            });
        }
        Ok(Statement::Try {
            expression,
            returns,
            body,
            catch_clauses,
            span,
        })
    }

    fn assembly(&mut self) -> PResult<Statement> {
        let start = self.expect("assembly")?;
        if self.peek().is_some_and(|t| t.kind == TokenKind::StringLiteral) {
            self.pos += 1;
        }
        if self.eat("(").is_some() {
            while !self.at(")") {
                if self.peek().is_none() {
                    return Err(self.unexpected(&[")"]));
                }
                self.pos += 1;
            }
            self.pos += 1;
        }
        self.expect("{")?;
        let mut depth = 1;
        while depth > 0 {
            let t = self.peek().ok_or_else(|| self.unexpected(&["}"]))?;
            if t.kind == TokenKind::Punctuation {
                match t.text.as_str() {
                    "{" => depth += 1,
                    "}" => depth -= 1,
                    _ => {}
                }
            }
            self.pos += 1;
        }
        let span = start.to(self.prev_span());
        Ok(Statement::InlineAssembly {
            text: self.text(span).to_string(),
            span,
        })
    }

    /// Variable declaration or expression, without the trailing `;`.
    fn simple_statement(&mut self) -> PResult<Statement> {
        if let Some(decl) = self.try_variable_declaration() {
            return Ok(decl);
        }
        let expression = self.expression()?;
        let span = expression.span();
        Ok(Statement::Expression { expression, span })
    }

    fn try_variable_declaration(&mut self) -> Option<Statement> {
        let save = self.pos;
        let result = if self.at("(") {
            self.tuple_declaration()
        } else {
            self.single_declaration()
        };
        match result {
            Ok(Some(stmt)) => Some(stmt),
            _ => {
                self.pos = save;
                None
            }
        }
    }

    fn single_declaration(&mut self) -> PResult<Option<Statement>> {
        let type_name = self.type_name()?;
        let mut span = type_name.span();
        let location = self.data_location().map(|(l, s)| {
            span = span.to(s);
            l
        });
        if !self.at_ident() {
            return Ok(None);
        }
        let (name, s) = self.expect_ident()?;
        span = span.to(s);
        let decl = VariableDeclaration {
            type_name,
            location,
            name: Some(name),
            indexed: false,
            span,
        };
        let initial_value = if self.eat("=").is_some() {
            Some(self.expression()?)
        } else if self.at(";") {
            None
        } else {
            return Ok(None);
        };
        let full = match &initial_value {
            Some(v) => span.to(v.span()),
            None => span,
        };
        Ok(Some(Statement::VariableDeclaration {
            declarations: vec![Some(decl)],
            initial_value,
            span: full,
        }))
    }

    fn tuple_declaration(&mut self) -> PResult<Option<Statement>> {
        let start = self.expect("(")?;
        let mut declarations = Vec::new();
        loop {
            if self.at(",") || self.at(")") {
                declarations.push(None);
            } else {
                let type_name = self.type_name()?;
                let mut span = type_name.span();
                let location = self.data_location().map(|(l, s)| {
                    span = span.to(s);
                    l
                });
                if !self.at_ident() {
                    return Ok(None);
                }
                let (name, s) = self.expect_ident()?;
                span = span.to(s);
                declarations.push(Some(VariableDeclaration {
                    type_name,
                    location,
                    name: Some(name),
                    indexed: false,
                    span,
                }));
            }
            if self.eat(",").is_none() {
                break;
            }
        }
        self.expect(")")?;
        if declarations.iter().all(Option::is_none) {
            return Ok(None);
        }
        self.expect("=")?;
        let value = self.expression()?;
        let span = start.to(value.span());
        Ok(Some(Statement::VariableDeclaration {
            declarations,
            initial_value: Some(value),
            span,
        }))
    }

    // ---- expressions ----

    fn expression(&mut self) -> PResult<Expression> {
        let left = self.conditional()?;
        if let Some(op) = self.peek().filter(|t| {
            t.kind == TokenKind::Operator && ASSIGN_OPS.contains(&t.text.as_str())
        }) {
            let operator = op.text.clone();
            self.pos += 1;
            let right = self.expression()?;
            let span = left.span().to(right.span());
            return Ok(Expression::Assignment {
                operator,
                left: Box::new(left),
                right: Box::new(right),
                span,
            });
        }
        Ok(left)
    }

    fn conditional(&mut self) -> PResult<Expression> {
        let condition = self.binary(0)?;
        if self.eat("?").is_none() {
            return Ok(condition);
        }
        let true_expression = self.expression()?;
        self.expect(":")?;
        let false_expression = self.expression()?;
        let span = condition.span().to(false_expression.span());
        Ok(Expression::Conditional {
            condition: Box::new(condition),
            true_expression: Box::new(true_expression),
            false_expression: Box::new(false_expression),
            span,
        })
    }

    fn binary(&mut self, level: usize) -> PResult<Expression> {
        if level == BINARY_LEVELS.len() {
            return self.power();
        }
        let mut left = self.binary(level + 1)?;
        while let Some(t) = self.peek() {
            if t.kind != TokenKind::Operator || !BINARY_LEVELS[level].contains(&t.text.as_str()) {
                break;
            }
            let operator = self.bump().text;
            let right = self.binary(level + 1)?;
            let span = left.span().to(right.span());
            left = Expression::BinaryOperation {
                operator,
                left: Box::new(left),
                right: Box::new(right),
                span,
            };
        }
        Ok(left)
    }

    fn power(&mut self) -> PResult<Expression> {
        let base = self.unary()?;
        if self.eat("**").is_none() {
            return Ok(base);
        }
        let exponent = self.power()?;
        let span = base.span().to(exponent.span());
        Ok(Expression::BinaryOperation {
            operator: "**".into(),
            left: Box::new(base),
            right: Box::new(exponent),
            span,
        })
    }

    fn unary(&mut self) -> PResult<Expression> {
        let is_prefix = self.peek().is_some_and(|t| {
            (t.kind == TokenKind::Operator && matches!(t.text.as_str(), "!" | "~" | "-" | "+" | "++" | "--"))
                || (t.kind == TokenKind::Keyword && t.text == "delete")
        });
        if is_prefix {
            let op = self.bump();
            let operand = self.unary()?;
            let span = op.span.to(operand.span());
            return Ok(Expression::UnaryOperation {
                operator: op.text,
                prefix: true,
                operand: Box::new(operand),
                span,
            });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expression> {
        let mut expr = self.primary()?;
        while let Some(t) = self.peek() {
            match (t.kind, t.text.as_str()) {
                (TokenKind::Punctuation, ".") => {
                    self.pos += 1;
                    let m = self.peek().ok_or_else(|| self.unexpected(&["member name"]))?;
                    if !matches!(m.kind, TokenKind::Identifier | TokenKind::Keyword) {
                        return Err(self.unexpected(&["member name"]));
                    }
                    let m = self.bump();
                    let span = expr.span().to(m.span);
                    expr = Expression::MemberAccess {
                        expression: Box::new(expr),
                        member: m.text,
                        span,
                    };
                }
                (TokenKind::Punctuation, "[") => {
                    self.pos += 1;
                    let start = if self.at("]") || self.at(":") {
                        None
                    } else {
                        Some(Box::new(self.expression()?))
                    };
                    if self.eat(":").is_some() {
                        let end_expr = if self.at("]") {
                            None
                        } else {
                            Some(Box::new(self.expression()?))
                        };
                        let end = self.expect("]")?;
                        let span = expr.span().to(end);
                        expr = Expression::IndexRange {
                            base: Box::new(expr),
                            start,
                            end: end_expr,
                            span,
                        };
                    } else {
                        let end = self.expect("]")?;
                        let span = expr.span().to(end);
                        expr = Expression::IndexAccess {
                            base: Box::new(expr),
                            index: start,
                            span,
                        };
                    }
                }
                (TokenKind::Punctuation, "(") => {
                    let (arguments, names, end) = self.call_arguments()?;
                    let span = expr.span().to(end);
                    expr = Expression::FunctionCall {
                        callee: Box::new(expr),
                        arguments,
                        names,
                        span,
                    };
                }
                (TokenKind::Punctuation, "{")
                    if self.peek_at(1).is_some_and(Self::is_ident_token) && self.at_n(2, ":") =>
                {
                    self.pos += 1;
                    let (names, values) = self.named_values("}")?;
                    let end = self.expect("}")?;
                    let span = expr.span().to(end);
                    expr = Expression::FunctionCallOptions {
                        expression: Box::new(expr),
                        names,
                        values,
                        span,
                    };
                }
                (TokenKind::Operator, "++" | "--") => {
                    let op = self.bump();
                    let span = expr.span().to(op.span);
                    expr = Expression::UnaryOperation {
                        operator: op.text,
                        prefix: false,
                        operand: Box::new(expr),
                        span,
                    };
                }
                _ => break,
            }
        }
        Ok(expr)
    }

    fn named_values(&mut self, close: &str) -> PResult<(Vec<String>, Vec<Expression>)> {
        let mut names = Vec::new();
        let mut values = Vec::new();
        while !self.at(close) {
            names.push(self.expect_ident()?.0);
            self.expect(":")?;
            values.push(self.expression()?);
            if self.eat(",").is_none() {
                break;
            }
        }
        Ok((names, values))
    }

    /// `( args )` or `({ name: value, ... })`; returns the closing span.
    fn call_arguments(&mut self) -> PResult<(Vec<Expression>, Vec<String>, Span)> {
        self.expect("(")?;
        if self.at("{") {
            self.pos += 1;
            let (names, values) = self.named_values("}")?;
            self.expect("}")?;
            let end = self.expect(")")?;
            return Ok((values, names, end));
        }
        let mut args = Vec::new();
        while !self.at(")") {
            args.push(self.expression()?);
            if self.eat(",").is_none() {
                break;
            }
        }
        let end = self.expect(")")?;
        Ok((args, Vec::new(), end))
    }

    fn primary(&mut self) -> PResult<Expression> {
        let Some(t) = self.peek() else {
            return Err(self.unexpected(&["expression"]));
        };
        match t.kind {
            TokenKind::NumberLiteral => {
                let t = self.bump();
                let literal_kind = if t.text.starts_with("0x") || t.text.starts_with("0X") {
                    LiteralKind::HexNumber
                } else {
                    LiteralKind::Number
                };
                let mut span = t.span;
                let mut unit = None;
                if let Some(u) = self.peek() {
                    if u.kind == TokenKind::Identifier && UNITS.contains(&u.text.as_str()) {
                        let u = self.bump();
                        span = span.to(u.span);
                        unit = Some(u.text);
                    }
                }
                Ok(Expression::Literal {
                    literal_kind,
                    value: t.text,
                    unit,
                    span,
                })
            }
            TokenKind::StringLiteral => {
                let first = self.bump();
                let literal_kind = if first.text.starts_with("hex") {
                    LiteralKind::HexString
                } else if first.text.starts_with("unicode") {
                    LiteralKind::UnicodeString
                } else {
                    LiteralKind::String
                };
                let mut span = first.span;
                while self
                    .peek()
                    .is_some_and(|t| t.kind == TokenKind::StringLiteral)
                {
                    span = span.to(self.bump().span);
                }
                Ok(Expression::Literal {
                    literal_kind,
                    value: self.text(span).to_string(),
                    unit: None,
                    span,
                })
            }
            TokenKind::Keyword if t.text == "true" || t.text == "false" => {
                let t = self.bump();
                Ok(Expression::Literal {
                    literal_kind: LiteralKind::Bool,
                    value: t.text,
                    unit: None,
                    span: t.span,
                })
            }
            TokenKind::Keyword if t.text == "payable" => {
                let t = self.bump();
                Ok(Expression::ElementaryType {
                    name: t.text,
                    span: t.span,
                })
            }
            TokenKind::Keyword if t.text == "new" => {
                let start = self.bump().span;
                let type_name = self.type_name()?;
                let span = start.to(type_name.span());
                Ok(Expression::New { type_name, span })
            }
            TokenKind::Keyword if t.text == "mapping" || t.text == "function" => {
                // type expressions such as abi.decode(data, (mapping ...)) are invalid;
                // function types only appear in declarations
                Err(self.unexpected(&["expression"]))
            }
            TokenKind::Identifier if is_elementary_type(&t.text) => {
                let t = self.bump();
                // `address payable` inside expressions, e.g. abi.decode type tuples
                let mut span = t.span;
                if t.text == "address" {
                    if let Some(s) = self.eat("payable") {
                        span = span.to(s);
                    }
                }
                // array type used as a value: `uint256[]` in abi.decode
                if self.at("[") && self.at_n(1, "]") {
                    self.pos += 2;
                    span = span.to(self.prev_span());
                }
                Ok(Expression::ElementaryType {
                    name: t.text,
                    span,
                })
            }
            _ if Self::is_ident_token(t) => {
                let t = self.bump();
                Ok(Expression::Identifier {
                    name: t.text,
                    span: t.span,
                })
            }
            TokenKind::Punctuation if t.text == "(" => {
                let start = self.bump().span;
                let mut components = Vec::new();
                loop {
                    if self.at(",") || self.at(")") {
                        components.push(None);
                    } else {
                        components.push(Some(self.expression()?));
                    }
                    if self.eat(",").is_none() {
                        break;
                    }
                }
                let end = self.expect(")")?;
                if components.len() == 1 && components[0].is_none() {
                    components.clear();
                }
                Ok(Expression::Tuple {
                    components,
                    span: start.to(end),
                })
            }
            TokenKind::Punctuation if t.text == "[" => {
                let start = self.bump().span;
                let mut components = Vec::new();
                while !self.at("]") {
                    components.push(self.expression()?);
                    if self.eat(",").is_none() {
                        break;
                    }
                }
                let end = self.expect("]")?;
                Ok(Expression::ArrayLiteral {
                    components,
                    span: start.to(end),
                })
            }
            _ => Err(self.unexpected(&["expression"])),
        }
    }
}

fn extend_simple(stmt: Statement, end: Span) -> Statement {
    match stmt {
        Statement::Expression { expression, span } => Statement::Expression {
            expression,
            span: span.to(end),
        },
        Statement::VariableDeclaration {
            declarations,
            initial_value,
            span,
        } => Statement::VariableDeclaration {
            declarations,
            initial_value,
            span: span.to(end),
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(src: &str) -> SourceUnit {
        parse_source_unit(src, "t.sol", FileId(0)).unwrap()
    }

    #[test]
    fn pragma_and_empty_contract() {
        let u = unit("pragma solidity ^0.8.0;\ncontract A {}");
        assert_eq!(u.pragmas.len(), 1);
        assert_eq!(u.pragmas[0].text, "solidity ^0.8.0");
        assert!(u.imports.is_empty());
        assert_eq!(u.contracts.len(), 1);
        let a = &u.contracts[0];
        assert_eq!(a.name, "A");
        assert!(a.functions.is_empty() && a.state_variables.is_empty());
    }

    #[test]
    fn interface_function_has_no_body() {
        let u = unit("interface I { function f() external; }");
        let c = &u.contracts[0];
        assert_eq!(c.contract_kind, ContractKind::Interface);
        assert_eq!(c.functions[0].name, "f");
        assert!(c.functions[0].body.is_none());
        assert_eq!(c.functions[0].visibility, Visibility::External);
    }

    #[test]
    fn missing_contract_name() {
        let err = parse_source_unit("contract {", "t.sol", FileId(0)).unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.expected, vec!["identifier".to_string()]);
    }

    #[test]
    fn broken_contract_does_not_sink_the_file() {
        let src = "contract Bad { function f( { }\ncontract Good { uint x; }";
        let u = unit(src);
        assert_eq!(u.contracts.len(), 1);
        assert_eq!(u.contracts[0].name, "Good");
        assert_eq!(u.diagnostics.len(), 1);
    }

    #[test]
    fn free_function_is_skipped_with_diagnostic() {
        let u = unit("function helper(uint a) pure returns (uint) { return a; }\ncontract A {}");
        assert_eq!(u.contracts.len(), 1);
        assert_eq!(u.diagnostics.len(), 1);
        assert!(u.diagnostics[0].message.contains("function"));
    }

    #[test]
    fn imports_all_forms() {
        let u = unit(
            r#"import "./A.sol";
import "./B.sol" as B;
import * as C from "./C.sol";
import {D, E as F} from "./DE.sol";"#,
        );
        let paths: Vec<_> = u.imports.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(paths, ["./A.sol", "./B.sol", "./C.sol", "./DE.sol"]);
        assert_eq!(u.imports[1].unit_alias.as_deref(), Some("B"));
        assert_eq!(u.imports[3].symbols[1].alias.as_deref(), Some("F"));
    }

    #[test]
    fn constructor_has_empty_name() {
        let u = unit("contract A is B(1), C { constructor(uint x) B(x) { } receive() external payable {} }");
        let c = &u.contracts[0];
        assert_eq!(c.bases.len(), 2);
        assert_eq!(c.functions[0].function_kind, FunctionKind::Constructor);
        assert_eq!(c.functions[0].name, "");
        assert_eq!(c.functions[0].modifiers[0].name, "B");
        assert_eq!(c.functions[1].function_kind, FunctionKind::Receive);
        assert_eq!(c.functions[1].mutability, Mutability::Payable);
    }

    #[test]
    fn low_level_call_with_options_and_tuple_decl() {
        let s = parse_statement(
            r#"(bool ok, ) = msg.sender.call{value: amt}("");"#,
            FileId(0),
        )
        .unwrap();
        let Statement::VariableDeclaration {
            declarations,
            initial_value: Some(Expression::FunctionCall { callee, .. }),
            ..
        } = s
        else {
            panic!("not a tuple declaration: {s:?}")
        };
        assert_eq!(declarations.len(), 2);
        assert!(declarations[1].is_none());
        assert!(matches!(*callee, Expression::FunctionCallOptions { .. }));
    }

    #[test]
    fn index_assignment_is_expression_not_declaration() {
        let s = parse_statement("balances[msg.sender] = 0;", FileId(0)).unwrap();
        assert!(matches!(
            s,
            Statement::Expression {
                expression: Expression::Assignment { .. },
                ..
            }
        ));
        assert_eq!(s.span().len(), "balances[msg.sender] = 0;".len());
    }

    #[test]
    fn precedence_division_inside_multiplication() {
        let e = parse_expression("a / b * c", FileId(0)).unwrap();
        let Expression::BinaryOperation { operator, left, .. } = e else {
            panic!()
        };
        assert_eq!(operator, "*");
        assert!(matches!(*left, Expression::BinaryOperation { ref operator, .. } if operator == "/"));
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse_expression("2 ** 3 ** 2", FileId(0)).unwrap();
        let Expression::BinaryOperation { right, .. } = e else {
            panic!()
        };
        assert!(matches!(*right, Expression::BinaryOperation { .. }));
    }

    #[test]
    fn literal_units() {
        let e = parse_expression("1 ether", FileId(0)).unwrap();
        assert!(matches!(e, Expression::Literal { unit: Some(ref u), .. } if u == "ether"));
    }

    #[test]
    fn assembly_is_opaque() {
        let s = parse_statement("assembly { let x := mload(0x40) if x { revert(0, 0) } }", FileId(0))
            .unwrap();
        let Statement::InlineAssembly { text, .. } = s else {
            panic!()
        };
        assert!(text.starts_with("assembly {") && text.ends_with('}'));
    }

    #[test]
    fn try_catch() {
        let s = parse_statement(
            "try oracle.price() returns (uint p) { last = p; } catch Error(string memory r) { } catch { }",
            FileId(0),
        )
        .unwrap();
        let Statement::Try { catch_clauses, returns, .. } = s else {
            panic!()
        };
        assert_eq!(returns.len(), 1);
        assert_eq!(catch_clauses.len(), 2);
    }

    #[test]
    fn revert_custom_error_statement() {
        let s = parse_statement("revert Unauthorized(msg.sender);", FileId(0)).unwrap();
        assert!(matches!(s, Statement::Revert { .. }));
        let s = parse_statement("revert(\"no\");", FileId(0)).unwrap();
        assert!(matches!(s, Statement::Expression { .. }));
    }

    #[test]
    fn placeholder_in_modifier() {
        let u = unit("contract A { modifier m() { require(x); _; } }");
        let body = u.contracts[0].modifiers[0].body.as_ref().unwrap();
        assert!(matches!(body.statements[1], Statement::Placeholder { .. }));
    }

    #[test]
    fn state_variable_attributes() {
        let u = unit(
            "contract A { uint256 public constant MAX = 1e18; address immutable owner; mapping(address => uint) internal bal; }",
        );
        let v = &u.contracts[0].state_variables;
        assert!(v[0].constant && v[0].visibility == Visibility::Public);
        assert!(v[1].immutable);
        assert_eq!(v[2].type_name.canonical(), "mapping(address=>uint256)");
    }

    #[test]
    fn from_is_a_valid_parameter_name() {
        let u = unit("contract T { function transferFrom(address from, address to) external {} }");
        assert_eq!(
            u.contracts[0].functions[0].parameters[0].name.as_deref(),
            Some("from")
        );
    }
}
