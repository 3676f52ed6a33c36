// SPDX-License-Identifier: Apache-2.0

//! Syntax tree for the supported Solidity subset.
//!
//! Every node carries the [`Span`] it was parsed from. Nodes serialize with a
//! `kind` tag so the JSON form reads as a generic node tree.

use serde::{Deserialize, Serialize};

use super::span::{FileId, Span};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct SourceUnit {
    pub path: String,
    pub file: FileId,
    pub pragmas: Vec<PragmaDirective>,
    pub imports: Vec<ImportDirective>,
    pub contracts: Vec<ContractDefinition>,
    /// File-level structs, enums, errors and events.
    pub structs: Vec<StructDefinition>,
    pub enums: Vec<EnumDefinition>,
    pub errors: Vec<ErrorDefinition>,
    pub events: Vec<EventDefinition>,
    /// Names introduced by `type X is ...;`.
    pub user_types: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
    pub span: Span,
}

/// A recoverable problem encountered while parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct PragmaDirective {
    /// Everything between `pragma` and `;`, verbatim.
    pub text: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct ImportDirective {
    /// The imported path with quotes removed.
    pub path: String,
    pub unit_alias: Option<String>,
    pub symbols: Vec<ImportSymbol>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportSymbol {
    pub name: String,
    pub alias: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContractKind {
    Contract,
    Interface,
    Library,
    AbstractContract,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct ContractDefinition {
    pub name: String,
    pub contract_kind: ContractKind,
    /// Base contracts in the order written after `is`.
    pub bases: Vec<InheritanceSpecifier>,
    pub state_variables: Vec<StateVariable>,
    pub functions: Vec<FunctionDefinition>,
    pub modifiers: Vec<ModifierDefinition>,
    pub events: Vec<EventDefinition>,
    pub structs: Vec<StructDefinition>,
    pub enums: Vec<EnumDefinition>,
    pub errors: Vec<ErrorDefinition>,
    pub using_for: Vec<UsingFor>,
    pub user_types: Vec<String>,
    pub span: Span,
}

impl ContractDefinition {
    pub fn constructor(&self) -> Option<&FunctionDefinition> {
        self.functions
            .iter()
            .find(|f| f.function_kind == FunctionKind::Constructor)
    }

    pub fn state_variable(&self, name: &str) -> Option<&StateVariable> {
        self.state_variables.iter().find(|v| v.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct InheritanceSpecifier {
    /// Possibly dotted base name as written.
    pub name: String,
    pub arguments: Vec<Expression>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct UsingFor {
    /// Library name, or the `{f, g}` list text for function-list directives.
    pub library: String,
    /// `None` for `using L for *`.
    pub target: Option<TypeName>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Visibility {
    Public,
    External,
    Internal,
    Private,
    Unspecified,
}

impl Visibility {
    pub fn is_entry_point(self) -> bool {
        matches!(self, Visibility::Public | Visibility::External)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutability {
    Pure,
    View,
    Payable,
    Nonpayable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataLocation {
    Memory,
    Storage,
    Calldata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct StateVariable {
    pub type_name: TypeName,
    pub name: String,
    pub visibility: Visibility,
    pub constant: bool,
    pub immutable: bool,
    pub initial_value: Option<Expression>,
    pub span: Span,
}

/// Parameter, return value, struct member, or local variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct VariableDeclaration {
    pub type_name: TypeName,
    pub location: Option<DataLocation>,
    pub name: Option<String>,
    pub indexed: bool,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    Function,
    Constructor,
    Fallback,
    Receive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct FunctionDefinition {
    /// Empty for constructors, fallback and receive functions.
    pub name: String,
    pub function_kind: FunctionKind,
    pub parameters: Vec<VariableDeclaration>,
    pub returns: Vec<VariableDeclaration>,
    pub visibility: Visibility,
    pub mutability: Mutability,
    pub is_virtual: bool,
    pub overrides: bool,
    pub modifiers: Vec<ModifierInvocation>,
    pub body: Option<Block>,
    pub span: Span,
}

impl FunctionDefinition {
    /// Name used in listings: the declared name, or the special kind.
    pub fn display_name(&self) -> &str {
        match self.function_kind {
            FunctionKind::Function => &self.name,
            FunctionKind::Constructor => "constructor",
            FunctionKind::Fallback => "fallback",
            FunctionKind::Receive => "receive",
        }
    }

    /// Canonical parameter-type list, e.g. `(uint256,address)`.
    pub fn signature(&self) -> String {
        param_signature(&self.parameters)
    }

    pub fn has_modifier(&self, name: &str) -> bool {
        self.modifiers.iter().any(|m| m.name == name)
    }
}

pub fn param_signature(params: &[VariableDeclaration]) -> String {
    let types: Vec<String> = params.iter().map(|p| p.type_name.canonical()).collect();
    format!("({})", types.join(","))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct ModifierInvocation {
    pub name: String,
    /// `None` when written without parentheses.
    pub arguments: Option<Vec<Expression>>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct ModifierDefinition {
    pub name: String,
    pub parameters: Vec<VariableDeclaration>,
    pub is_virtual: bool,
    pub overrides: bool,
    pub body: Option<Block>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct EventDefinition {
    pub name: String,
    pub parameters: Vec<VariableDeclaration>,
    pub anonymous: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct StructDefinition {
    pub name: String,
    pub members: Vec<VariableDeclaration>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct EnumDefinition {
    pub name: String,
    pub values: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct ErrorDefinition {
    pub name: String,
    pub parameters: Vec<VariableDeclaration>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TypeName {
    Elementary {
        name: String,
        payable: bool,
        span: Span,
    },
    UserDefined {
        path: String,
        span: Span,
    },
    Mapping {
        key: Box<TypeName>,
        value: Box<TypeName>,
        span: Span,
    },
    Array {
        base: Box<TypeName>,
        length: Option<Box<Expression>>,
        span: Span,
    },
    /// Function types are kept opaque.
    FunctionType {
        text: String,
        span: Span,
    },
}

impl TypeName {
    pub fn span(&self) -> Span {
        match self {
            TypeName::Elementary { span, .. }
            | TypeName::UserDefined { span, .. }
            | TypeName::Mapping { span, .. }
            | TypeName::Array { span, .. }
            | TypeName::FunctionType { span, .. } => *span,
        }
    }

    /// Canonical type string used in signatures: `uint` becomes `uint256`,
    /// `address payable` becomes `address`, whitespace is dropped.
    pub fn canonical(&self) -> String {
        match self {
            TypeName::Elementary { name, .. } => canonical_elementary(name),
            TypeName::UserDefined { path, .. } => path.clone(),
            TypeName::Mapping { key, value, .. } => {
                format!("mapping({}=>{})", key.canonical(), value.canonical())
            }
            TypeName::Array { base, length, .. } => match length.as_deref() {
                Some(Expression::Literal { value, .. }) => {
                    format!("{}[{}]", base.canonical(), value)
                }
                Some(_) => format!("{}[?]", base.canonical()),
                None => format!("{}[]", base.canonical()),
            },
            TypeName::FunctionType { text, .. } => {
                text.split_whitespace().collect::<Vec<_>>().join(" ")
            }
        }
    }

    pub fn is_address(&self) -> bool {
        matches!(self, TypeName::Elementary { name, .. } if name == "address")
    }

    /// Value types that may be declared `constant`.
    pub fn is_constant_eligible(&self) -> bool {
        matches!(self, TypeName::Elementary { .. })
    }
}

pub fn canonical_elementary(name: &str) -> String {
    match name {
        "uint" => "uint256".into(),
        "int" => "int256".into(),
        "byte" => "bytes1".into(),
        "ufixed" => "ufixed128x18".into(),
        "fixed" => "fixed128x18".into(),
        other => other.into(),
    }
}

/// Whether `word` names a builtin value type.
pub fn is_elementary_type(word: &str) -> bool {
    fn sized(rest: &str, max: u32, step: u32) -> bool {
        rest.is_empty()
            || rest
                .parse::<u32>()
                .is_ok_and(|n| n >= step && n <= max && n % step == 0 && !rest.starts_with('0'))
    }
    match word {
        "address" | "bool" | "string" | "bytes" | "byte" | "fixed" | "ufixed" => true,
        _ => {
            if let Some(rest) = word.strip_prefix("uint") {
                sized(rest, 256, 8)
            } else if let Some(rest) = word.strip_prefix("int") {
                sized(rest, 256, 8)
            } else if let Some(rest) = word.strip_prefix("bytes") {
                !rest.is_empty() && sized(rest, 32, 1)
            } else {
                false
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct Block {
    pub statements: Vec<Statement>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub struct CatchClause {
    pub identifier: Option<String>,
    pub parameters: Vec<VariableDeclaration>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Statement {
    Block {
        statements: Vec<Statement>,
        span: Span,
    },
    Unchecked {
        statements: Vec<Statement>,
        span: Span,
    },
    Expression {
        expression: Expression,
        span: Span,
    },
    /// Single or tuple declaration; tuple slots may be empty.
    VariableDeclaration {
        declarations: Vec<Option<VariableDeclaration>>,
        initial_value: Option<Expression>,
        span: Span,
    },
    If {
        condition: Expression,
        true_body: Box<Statement>,
        false_body: Option<Box<Statement>>,
        span: Span,
    },
    For {
        init: Option<Box<Statement>>,
        condition: Option<Expression>,
        update: Option<Expression>,
        body: Box<Statement>,
        span: Span,
    },
    While {
        condition: Expression,
        body: Box<Statement>,
        span: Span,
    },
    DoWhile {
        body: Box<Statement>,
        condition: Expression,
        span: Span,
    },
    Return {
        expression: Option<Expression>,
        span: Span,
    },
    Emit {
        event_call: Expression,
        span: Span,
    },
    /// `revert CustomError(...)`; plain `revert(...)` is an expression statement.
    Revert {
        error_call: Expression,
        span: Span,
    },
    Try {
        expression: Expression,
        returns: Vec<VariableDeclaration>,
        body: Block,
        catch_clauses: Vec<CatchClause>,
        span: Span,
    },
    Break {
        span: Span,
    },
    Continue {
        span: Span,
    },
    /// The `_;` placeholder inside modifier bodies.
    Placeholder {
        span: Span,
    },
    /// Inline assembly, captured as raw text and not parsed further.
    InlineAssembly {
        text: String,
        span: Span,
    },
}

impl Statement {
    pub fn span(&self) -> Span {
        match self {
            Statement::Block { span, .. }
            | Statement::Unchecked { span, .. }
            | Statement::Expression { span, .. }
            | Statement::VariableDeclaration { span, .. }
            | Statement::If { span, .. }
            | Statement::For { span, .. }
            | Statement::While { span, .. }
            | Statement::DoWhile { span, .. }
            | Statement::Return { span, .. }
            | Statement::Emit { span, .. }
            | Statement::Revert { span, .. }
            | Statement::Try { span, .. }
            | Statement::Break { span }
            | Statement::Continue { span }
            | Statement::Placeholder { span }
            | Statement::InlineAssembly { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiteralKind {
    Number,
    HexNumber,
    String,
    HexString,
    UnicodeString,
    Bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Expression {
    Identifier {
        name: String,
        span: Span,
    },
    /// A builtin type used as a value, e.g. the `address` in `address(0)`.
    ElementaryType {
        name: String,
        span: Span,
    },
    Literal {
        literal_kind: LiteralKind,
        /// Literal text as written (strings keep their quotes).
        value: String,
        /// Denomination such as `ether` or `days`.
        unit: Option<String>,
        span: Span,
    },
    FunctionCall {
        callee: Box<Expression>,
        arguments: Vec<Expression>,
        /// Argument names for `f({a: 1})` calls; empty for positional calls.
        names: Vec<String>,
        span: Span,
    },
    /// `expr{value: v, gas: g}`
    FunctionCallOptions {
        expression: Box<Expression>,
        names: Vec<String>,
        values: Vec<Expression>,
        span: Span,
    },
    MemberAccess {
        expression: Box<Expression>,
        member: String,
        span: Span,
    },
    IndexAccess {
        base: Box<Expression>,
        index: Option<Box<Expression>>,
        span: Span,
    },
    IndexRange {
        base: Box<Expression>,
        start: Option<Box<Expression>>,
        end: Option<Box<Expression>>,
        span: Span,
    },
    Assignment {
        operator: String,
        left: Box<Expression>,
        right: Box<Expression>,
        span: Span,
    },
    BinaryOperation {
        operator: String,
        left: Box<Expression>,
        right: Box<Expression>,
        span: Span,
    },
    UnaryOperation {
        operator: String,
        prefix: bool,
        operand: Box<Expression>,
        span: Span,
    },
    Conditional {
        condition: Box<Expression>,
        true_expression: Box<Expression>,
        false_expression: Box<Expression>,
        span: Span,
    },
    /// Tuples and parenthesized expressions (a one-element tuple).
    Tuple {
        components: Vec<Option<Expression>>,
        span: Span,
    },
    ArrayLiteral {
        components: Vec<Expression>,
        span: Span,
    },
    New {
        type_name: TypeName,
        span: Span,
    },
}

impl Expression {
    pub fn span(&self) -> Span {
        match self {
            Expression::Identifier { span, .. }
            | Expression::ElementaryType { span, .. }
            | Expression::Literal { span, .. }
            | Expression::FunctionCall { span, .. }
            | Expression::FunctionCallOptions { span, .. }
            | Expression::MemberAccess { span, .. }
            | Expression::IndexAccess { span, .. }
            | Expression::IndexRange { span, .. }
            | Expression::Assignment { span, .. }
            | Expression::BinaryOperation { span, .. }
            | Expression::UnaryOperation { span, .. }
            | Expression::Conditional { span, .. }
            | Expression::Tuple { span, .. }
            | Expression::ArrayLiteral { span, .. }
            | Expression::New { span, .. } => *span,
        }
    }

    /// Look through parentheses: `((x))` yields `x`.
    pub fn strip_parens(&self) -> &Expression {
        match self {
            Expression::Tuple { components, .. } if components.len() == 1 => {
                match &components[0] {
                    Some(inner) => inner.strip_parens(),
                    None => self,
                }
            }
            _ => self,
        }
    }

    pub fn as_identifier(&self) -> Option<&str> {
        match self.strip_parens() {
            Expression::Identifier { name, .. } => Some(name),
            _ => None,
        }
    }

    /// `Some(("block", "timestamp"))` for `block.timestamp`.
    pub fn as_member_of_identifier(&self) -> Option<(&str, &str)> {
        match self.strip_parens() {
            Expression::MemberAccess {
                expression, member, ..
            } => expression.as_identifier().map(|base| (base, member.as_str())),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_type_names() {
        for t in ["uint", "uint8", "uint256", "int128", "bytes32", "bytes1", "address", "bool"] {
            assert!(is_elementary_type(t), "{t}");
        }
        for t in ["uint7", "uint264", "bytes33", "bytes0", "uint08", "Uint", "owner"] {
            assert!(!is_elementary_type(t), "{t}");
        }
    }

    #[test]
    fn canonical_types() {
        let span = Span::default();
        let t = TypeName::Mapping {
            key: Box::new(TypeName::Elementary {
                name: "address".into(),
                payable: true,
                span,
            }),
            value: Box::new(TypeName::Elementary {
                name: "uint".into(),
                payable: false,
                span,
            }),
            span,
        };
        assert_eq!(t.canonical(), "mapping(address=>uint256)");
    }
}
