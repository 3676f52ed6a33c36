// SPDX-License-Identifier: Apache-2.0

//! Per-category trigger predicates used to pick candidate functions.

use std::collections::HashSet;

use crate::ast::visit::{own_expressions, walk_block, walk_block_expressions};
use crate::ast::{Expression, FunctionKind, LiteralKind, Statement};

use super::scope::FunctionScope;
use super::{CallKind, CallableId, FunctionRef, ProjectModel, StateVarId, VulnCategory};

/// Functions of the retained set whose shape matches the trigger predicate
/// of `category`, ordered by file path then position.
pub fn candidate_functions(model: &ProjectModel, category: VulnCategory) -> Vec<FunctionRef> {
    let fixed = match category {
        VulnCategory::ConstantOptimization => Some(constant_candidates(model)),
        _ => None,
    };
    let mut out: Vec<FunctionRef> = model
        .callable_ids()
        .into_iter()
        .filter(|id| matches!(id, CallableId::Function { .. }))
        .filter(|id| model.callable(*id).body().is_some())
        .filter(|id| match &fixed {
            Some(set) => set.contains(id),
            None => matches_trigger(model, *id, category),
        })
        .map(|id| model.function_ref(id))
        .collect();
    out.sort_by(|a, b| (&a.file, a.span.start).cmp(&(&b.file, b.span.start)));
    out
}

fn matches_trigger(model: &ProjectModel, id: CallableId, category: VulnCategory) -> bool {
    let f = model
        .callable(id)
        .as_function()
        .expect("candidates are functions");
    let body = f.body.as_ref().expect("filtered on body");
    let graph = &model.call_graph;
    let is_plain = f.function_kind == FunctionKind::Function;
    match category {
        VulnCategory::Reentrancy => graph.external_edges_from(id).next().is_some(),
        VulnCategory::MissingEvent => {
            is_plain && f.visibility.is_entry_point() && !writes_in_closure(model, id).is_empty()
        }
        VulnCategory::Centralization => f
            .modifiers
            .iter()
            .any(|inv| modifier_is_privileged(model, id, &inv.name)),
        VulnCategory::InputValidation => {
            is_plain && f.visibility.is_entry_point() && !f.parameters.is_empty()
        }
        VulnCategory::WeakRandomness => {
            let mut hit = false;
            walk_block_expressions(body, &mut |e| hit |= is_randomness_source(e));
            hit
        }
        VulnCategory::SandwichAttack => graph.external_edges_from(id).any(|e| {
            let n = e.callee_name.to_ascii_lowercase();
            n.contains("swap") || n.contains("addliquidity") || n.contains("removeliquidity")
        }),
        VulnCategory::RedundantStatements => true,
        VulnCategory::FlashloanAttack => {
            matches!(f.name.as_str(), "onFlashLoan" | "executeOperation")
                || graph
                    .edges_from(id)
                    .any(|e| e.callee_name.to_ascii_lowercase().starts_with("flashloan"))
        }
        VulnCategory::TooManyDigits => {
            let mut hit = false;
            walk_block_expressions(body, &mut |e| hit |= is_long_literal(e));
            hit
        }
        VulnCategory::ErrorMessage => {
            let mut hit = false;
            walk_block(body, &mut |s| hit |= matches!(s, Statement::Revert { .. }));
            hit || graph.edges_from(id).any(|e| {
                e.kind == CallKind::Builtin
                    && e.receiver.is_none()
                    && matches!(e.callee_name.as_str(), "require" | "revert")
            })
        }
        VulnCategory::ConstantOptimization => unreachable!("handled by constant_candidates"),
        VulnCategory::ReturnValueCheck => {
            let mut hit = false;
            walk_block(body, &mut |s| {
                if let Statement::Expression { expression, .. } = s {
                    hit |= discards_return_value(model, id, expression);
                }
            });
            hit
        }
        VulnCategory::DivisionBeforeMultiplication => {
            let mut hit = false;
            walk_block_expressions(body, &mut |e| hit |= is_division_before_multiplication(e));
            hit
        }
    }
}

/// State variables written by `id` or any callable it reaches internally.
pub(crate) fn writes_in_closure(model: &ProjectModel, id: CallableId) -> Vec<StateVarId> {
    let mut out = Vec::new();
    for c in model.call_graph.internal_closure(id) {
        out.extend(direct_writes(model, c));
    }
    out.sort();
    out.dedup();
    out
}

pub(crate) fn direct_writes(model: &ProjectModel, id: CallableId) -> Vec<StateVarId> {
    let Some(body) = model.callable(id).body() else {
        return Vec::new();
    };
    let scope = FunctionScope::new(model, id);
    let mut out = Vec::new();
    walk_block(body, &mut |s| {
        for e in own_expressions(s) {
            out.extend(scope.written_state_vars(e));
        }
    });
    out.sort();
    out.dedup();
    out
}

/// Names that suggest a privileged role.
pub(crate) fn is_privileged_name(name: &str) -> bool {
    let n = name.to_ascii_lowercase();
    n.contains("owner") || n.contains("admin")
}

fn modifier_is_privileged(model: &ProjectModel, function: CallableId, name: &str) -> bool {
    let Some(m) = model.lookup_modifier(function.contract(), name) else {
        // modifier defined outside the retained set: judge by its name
        return is_privileged_name(name);
    };
    model.call_graph.internal_closure(m).into_iter().any(|c| {
        let Some(body) = model.callable(c).body() else {
            return false;
        };
        let scope = FunctionScope::new(model, c);
        let mut hit = false;
        walk_block_expressions(body, &mut |e| {
            hit |= scope
                .referenced_state_vars(e)
                .iter()
                .any(|v| is_privileged_name(&model.state_var(*v).name));
            if let Expression::BinaryOperation {
                operator,
                left,
                right,
                ..
            } = e
            {
                if matches!(operator.as_str(), "==" | "!=") {
                    let sender = |x: &Expression| x.as_member_of_identifier() == Some(("msg", "sender"));
                    let privileged = |x: &Expression| is_privileged_name(model.text(x.span()));
                    hit |= (sender(left) && privileged(right)) || (sender(right) && privileged(left));
                }
            }
        });
        hit
    })
}

pub(crate) fn is_randomness_source(e: &Expression) -> bool {
    match e {
        Expression::Identifier { name, .. } => name == "now",
        Expression::FunctionCall { callee, .. } => callee.as_identifier() == Some("blockhash"),
        Expression::MemberAccess { .. } => matches!(
            e.as_member_of_identifier(),
            Some(("block", "timestamp" | "difficulty" | "prevrandao" | "blockhash"))
        ),
        _ => false,
    }
}

/// A plain decimal literal with seven or more digits, no `_` separators and
/// no denomination.
pub(crate) fn is_long_literal(e: &Expression) -> bool {
    match e {
        Expression::Literal {
            literal_kind: LiteralKind::Number,
            value,
            unit: None,
            ..
        } => {
            !value.contains('_')
                && !value.contains(['e', 'E'])
                && value.chars().filter(char::is_ascii_digit).count() >= 7
        }
        _ => false,
    }
}

pub(crate) fn is_division_before_multiplication(e: &Expression) -> bool {
    let is_div = |x: &Expression| {
        matches!(x.strip_parens(), Expression::BinaryOperation { operator, .. } if operator == "/")
    };
    match e {
        Expression::BinaryOperation {
            operator,
            left,
            right,
            ..
        } if operator == "*" => is_div(left) || is_div(right),
        Expression::Assignment {
            operator, right, ..
        } if operator == "*=" => is_div(right),
        _ => false,
    }
}

/// ERC-20 style functions that return a success flag callers should check,
/// used when the callee's interface is not in the retained set.
pub(crate) const BOOL_RETURNING_TOKEN_CALLS: &[&str] = &["transfer", "transferFrom", "approve"];

/// Whether statement expression `expr` is a bare call whose return value
/// is thrown away.
pub(crate) fn discards_return_value(model: &ProjectModel, caller: CallableId, expr: &Expression) -> bool {
    let call = expr.strip_parens();
    if !matches!(call, Expression::FunctionCall { .. }) {
        return false;
    }
    let span = call.span();
    let Some(edge) = model
        .call_graph
        .edges_from(caller)
        .find(|e| e.span == span)
    else {
        return false;
    };
    if let Some(callee) = &edge.callee {
        return model
            .callable(callee.id)
            .as_function()
            .is_some_and(|f| !f.returns.is_empty());
    }
    match edge.kind {
        CallKind::External if edge.address_receiver => {
            matches!(edge.callee_name.as_str(), "call" | "send" | "delegatecall" | "staticcall")
        }
        CallKind::External => BOOL_RETURNING_TOKEN_CALLS.contains(&edge.callee_name.as_str()),
        _ => false,
    }
}

/// State variables assigned only at their declaration or in a constructor
/// that are not yet `constant` or `immutable`.
pub(crate) fn constant_eligible_vars(model: &ProjectModel) -> HashSet<StateVarId> {
    let mut written_outside_ctor: HashSet<StateVarId> = HashSet::new();
    for id in model.callable_ids() {
        let is_ctor = model
            .callable(id)
            .as_function()
            .is_some_and(|f| f.function_kind == FunctionKind::Constructor);
        if !is_ctor {
            written_outside_ctor.extend(direct_writes(model, id));
        }
    }
    model
        .contract_ids()
        .flat_map(|cid| {
            model
                .contract(cid)
                .state_variables
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.constant && !v.immutable && v.type_name.is_constant_eligible())
                .map(move |(index, _)| StateVarId {
                    contract: cid,
                    index,
                })
        })
        .filter(|v| !written_outside_ctor.contains(v))
        .collect()
}

/// Functions touching a variable from [`constant_eligible_vars`].
fn constant_candidates(model: &ProjectModel) -> HashSet<CallableId> {
    let eligible = constant_eligible_vars(model);
    let mut out = HashSet::new();
    if eligible.is_empty() {
        return out;
    }
    for id in model.callable_ids() {
        let CallableId::Function { .. } = id else {
            continue;
        };
        let Some(body) = model.callable(id).body() else {
            continue;
        };
        let scope = FunctionScope::new(model, id);
        let mut hit = false;
        walk_block(body, &mut |s| {
            for e in own_expressions(s) {
                hit |= scope
                    .referenced_state_vars(e)
                    .iter()
                    .any(|v| eligible.contains(v));
            }
        });
        if hit {
            out.insert(id);
        }
    }
    out
}
