// SPDX-License-Identifier: Apache-2.0

//! Name and type resolution inside one function or modifier body.

use std::collections::HashMap;

use crate::ast::visit::walk_block;
use crate::ast::{DataLocation, Expression, Statement, TypeName, VariableDeclaration};

use super::{last_segment, CallableId, ContractId, ProjectModel, StateVarId};

/// Coarse static type of an expression, enough to classify calls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueType {
    Address,
    /// Contract or interface type. The id is `None` when the definition is
    /// not among the retained files.
    Contract(Option<ContractId>, String),
    Struct(String),
    Array(Box<ValueType>),
    Mapping(Box<ValueType>),
    /// `bytes` and `string`.
    Bytes,
    /// Any other value type (integers, bool, enums, ...).
    Value,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolved {
    Local,
    StateVar(StateVarId),
    Contract(ContractId),
    /// `this`, `super`, builtin globals and unknown names.
    Other,
}

/// Locals and parameters of one callable plus the enclosing contract.
pub struct FunctionScope<'m> {
    pub model: &'m ProjectModel,
    pub contract: ContractId,
    locals: HashMap<String, TypeName>,
    /// Storage-pointer locals bound to a state variable, e.g.
    /// `Info storage i = infos[id];`.
    aliases: HashMap<String, StateVarId>,
}

impl<'m> FunctionScope<'m> {
    pub fn new(model: &'m ProjectModel, id: CallableId) -> Self {
        let callable = model.callable(id);
        let mut scope = FunctionScope {
            model,
            contract: id.contract(),
            locals: HashMap::new(),
            aliases: HashMap::new(),
        };
        for p in callable.parameters().iter().chain(callable.returns()) {
            scope.declare(p);
        }
        if let Some(body) = callable.body() {
            walk_block(body, &mut |s| scope.declare_statement(s));
        }
        scope
    }

    /// A scope with only contract-level names, for state-variable initializers.
    pub fn contract_level(model: &'m ProjectModel, contract: ContractId) -> Self {
        FunctionScope {
            model,
            contract,
            locals: HashMap::new(),
            aliases: HashMap::new(),
        }
    }

    fn declare(&mut self, decl: &VariableDeclaration) {
        if let Some(name) = &decl.name {
            self.locals.insert(name.clone(), decl.type_name.clone());
        }
    }

    fn declare_statement(&mut self, stmt: &Statement) {
        match stmt {
            Statement::VariableDeclaration {
                declarations,
                initial_value,
                ..
            } => {
                for d in declarations.iter().flatten() {
                    self.declare(d);
                }
                if let ([Some(d)], Some(init)) = (declarations.as_slice(), initial_value) {
                    if d.location == Some(DataLocation::Storage) {
                        if let (Some(name), Some(target)) = (&d.name, self.state_var_of_base(init)) {
                            self.aliases.insert(name.clone(), target);
                        }
                    }
                }
            }
            Statement::Try {
                returns,
                catch_clauses,
                ..
            } => {
                for r in returns {
                    self.declare(r);
                }
                for c in catch_clauses {
                    for p in &c.parameters {
                        self.declare(p);
                    }
                }
            }
            _ => {}
        }
    }

    pub fn resolve(&self, name: &str) -> Resolved {
        if self.locals.contains_key(name) {
            return Resolved::Local;
        }
        if let Some(v) = self.model.lookup_state_var(self.contract, name) {
            return Resolved::StateVar(v);
        }
        if let Some(c) = self.model.resolve_contract(name, self.contract.unit) {
            return Resolved::Contract(c);
        }
        Resolved::Other
    }

    /// State variable at the root of an lvalue-like expression: `x`,
    /// `x[i].f`, `x.f[i]`, or a storage alias of one.
    pub fn state_var_of_base(&self, expr: &Expression) -> Option<StateVarId> {
        match expr.strip_parens() {
            Expression::Identifier { name, .. } => {
                if let Some(v) = self.aliases.get(name) {
                    return Some(*v);
                }
                match self.resolve(name) {
                    Resolved::StateVar(v) => Some(v),
                    _ => None,
                }
            }
            Expression::IndexAccess { base, .. } | Expression::IndexRange { base, .. } => {
                self.state_var_of_base(base)
            }
            Expression::MemberAccess {
                expression, member, ..
            } => {
                // `this.x` reads the public getter, not storage
                if expression.as_identifier() == Some("this") {
                    return None;
                }
                // `Contract.x` for an inherited state variable
                if let Some(base) = expression.as_identifier() {
                    if let Resolved::Contract(_) = self.resolve(base) {
                        return self.model.lookup_state_var(self.contract, member);
                    }
                }
                self.state_var_of_base(expression)
            }
            _ => None,
        }
    }

    /// State variables assigned, incremented, deleted, pushed or popped by
    /// `expr` itself (not by calls it makes).
    pub fn written_state_vars(&self, expr: &Expression) -> Vec<StateVarId> {
        let mut out = Vec::new();
        crate::ast::visit::walk_expression(expr, &mut |e| match e {
            Expression::Assignment { left, .. } => self.lvalue_targets(left, &mut out),
            Expression::UnaryOperation {
                operator, operand, ..
            } if matches!(operator.as_str(), "++" | "--" | "delete") => {
                self.lvalue_targets(operand, &mut out)
            }
            Expression::FunctionCall { callee, .. } => {
                if let Expression::MemberAccess {
                    expression, member, ..
                } = callee.strip_parens()
                {
                    if matches!(member.as_str(), "push" | "pop") {
                        if let Some(v) = self.state_var_of_base(expression) {
                            out.push(v);
                        }
                    }
                }
            }
            _ => {}
        });
        out.dedup();
        out
    }

    fn lvalue_targets(&self, lhs: &Expression, out: &mut Vec<StateVarId>) {
        match lhs.strip_parens() {
            Expression::Tuple { components, .. } => {
                for c in components.iter().flatten() {
                    self.lvalue_targets(c, out);
                }
            }
            other => {
                if let Some(v) = self.state_var_of_base(other) {
                    out.push(v);
                }
            }
        }
    }

    /// Every state variable named anywhere in `expr`, including through aliases.
    pub fn referenced_state_vars(&self, expr: &Expression) -> Vec<StateVarId> {
        let mut out = Vec::new();
        crate::ast::visit::walk_expression(expr, &mut |e| match e {
            Expression::Identifier { name, .. } => {
                if let Some(v) = self.aliases.get(name) {
                    out.push(*v);
                } else if let Resolved::StateVar(v) = self.resolve(name) {
                    out.push(v);
                }
            }
            Expression::MemberAccess {
                expression, member, ..
            } => {
                if let Some(base) = expression.as_identifier() {
                    if let Resolved::Contract(_) = self.resolve(base) {
                        if let Some(v) = self.model.lookup_state_var(self.contract, member) {
                            out.push(v);
                        }
                    }
                }
            }
            _ => {}
        });
        out
    }

    pub fn type_of_name(&self, t: &TypeName) -> ValueType {
        match t {
            TypeName::Elementary { name, .. } => match name.as_str() {
                "address" => ValueType::Address,
                "bytes" | "string" => ValueType::Bytes,
                _ => ValueType::Value,
            },
            TypeName::UserDefined { path, .. } => self.user_type(path),
            TypeName::Array { base, .. } => ValueType::Array(Box::new(self.type_of_name(base))),
            TypeName::Mapping { value, .. } => {
                ValueType::Mapping(Box::new(self.type_of_name(value)))
            }
            TypeName::FunctionType { .. } => ValueType::Value,
        }
    }

    fn user_type(&self, path: &str) -> ValueType {
        if let Some(id) = self.model.resolve_contract(path, self.contract.unit) {
            return ValueType::Contract(Some(id), self.model.contract(id).name.clone());
        }
        if self.model.lookup_struct(self.contract, path).is_some() {
            return ValueType::Struct(last_segment(path).to_string());
        }
        if self.model.is_plain_type_name(self.contract, path) {
            return ValueType::Value;
        }
        // an unknown user-defined type is most often an interface whose
        // source was filtered out
        ValueType::Contract(None, last_segment(path).to_string())
    }

    pub fn type_of(&self, expr: &Expression) -> ValueType {
        match expr.strip_parens() {
            Expression::Identifier { name, .. } => {
                if let Some(t) = self.locals.get(name) {
                    return self.type_of_name(t);
                }
                match self.resolve(name) {
                    Resolved::StateVar(v) => self.type_of_name(&self.model.state_var(v).type_name),
                    _ if name == "this" => ValueType::Contract(
                        Some(self.contract),
                        self.model.contract(self.contract).name.clone(),
                    ),
                    _ => ValueType::Unknown,
                }
            }
            Expression::MemberAccess {
                expression, member, ..
            } => {
                if let Some((base, m)) = expr.as_member_of_identifier() {
                    match (base, m) {
                        ("msg", "sender") | ("tx", "origin") | ("block", "coinbase") => {
                            return ValueType::Address
                        }
                        ("msg", "data") => return ValueType::Bytes,
                        _ => {}
                    }
                }
                match self.type_of(expression) {
                    ValueType::Struct(s) => self
                        .model
                        .lookup_struct(self.contract, &s)
                        .and_then(|def| {
                            def.members
                                .iter()
                                .find(|f| f.name.as_deref() == Some(member.as_str()))
                        })
                        .map(|f| self.type_of_name(&f.type_name))
                        .unwrap_or(ValueType::Unknown),
                    _ => ValueType::Unknown,
                }
            }
            Expression::IndexAccess { base, .. } => match self.type_of(base) {
                ValueType::Array(inner) | ValueType::Mapping(inner) => *inner,
                _ => ValueType::Unknown,
            },
            Expression::FunctionCall {
                callee, arguments, ..
            } => match callee.strip_parens() {
                Expression::ElementaryType { name, .. } => match name.as_str() {
                    "address" | "payable" => ValueType::Address,
                    "bytes" | "string" => ValueType::Bytes,
                    _ => ValueType::Value,
                },
                Expression::Identifier { name, .. } if name == "payable" => ValueType::Address,
                Expression::Identifier { name, .. } if arguments.len() == 1 => {
                    match self.resolve(name) {
                        Resolved::Contract(id) => ValueType::Contract(
                            Some(id),
                            self.model.contract(id).name.clone(),
                        ),
                        Resolved::Other
                            if name.starts_with('I')
                                && name.chars().nth(1).is_some_and(|c| c.is_ascii_uppercase()) =>
                        {
                            // `IERC20(token)` for an interface outside the retained set
                            ValueType::Contract(None, name.clone())
                        }
                        _ => ValueType::Unknown,
                    }
                }
                _ => ValueType::Unknown,
            },
            Expression::New { type_name, .. } => self.type_of_name(type_name),
            _ => ValueType::Unknown,
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_expression;
    use crate::ast::FileId;

    fn model() -> ProjectModel {
        ProjectModel::from_sources(&[(
            "V.sol",
            "interface IERC20 { function transfer(address to, uint256 v) external returns (bool); }
             contract Vault {
                 struct Info { uint256 amount; address owner; }
                 IERC20 token;
                 mapping(address => Info) infos;
                 uint256[] list;
                 function f(uint256 id) external {
                     Info storage i = infos[msg.sender];
                     i.amount = id;
                 }
             }",
        )])
    }

    #[test]
    fn types_and_aliases() {
        let m = model();
        let f = m.find_function("Vault", "f", None).unwrap();
        let scope = FunctionScope::new(&m, f.id);
        let e = |s: &str| parse_expression(s, FileId(0)).unwrap();
        assert!(matches!(scope.type_of(&e("token")), ValueType::Contract(Some(_), _)));
        assert_eq!(scope.type_of(&e("infos[x].owner")), ValueType::Address);
        assert_eq!(scope.type_of(&e("payable(msg.sender)")), ValueType::Address);
        assert!(matches!(scope.type_of(&e("IUnknown(x)")), ValueType::Contract(None, _)));
        let writes = scope.written_state_vars(&e("i.amount = 3"));
        assert_eq!(m.state_var(writes[0]).name, "infos");
        let writes = scope.written_state_vars(&e("list.push(1)"));
        assert_eq!(m.state_var(writes[0]).name, "list");
        assert!(scope.written_state_vars(&e("id = 1")).is_empty());
    }
}
