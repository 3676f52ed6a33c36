// SPDX-License-Identifier: Apache-2.0

//! Deterministic detectors: the reentrancy decision rules of the reentrancy
//! instruction template plus syntactic checks for crisply defined categories.

use std::collections::HashSet;

use crate::ast::visit::{own_expressions, walk_block, walk_expression};
use crate::ast::{Expression, FunctionKind, LiteralKind, Mutability, Span, Statement};
use crate::project::{
    constant_eligible_vars, discards_return_value, is_division_before_multiplication,
    is_long_literal, writes_in_closure, CallEdge, CallKind, CallableId, FunctionRef,
    FunctionScope, ProjectModel, VulnCategory,
};

use super::{Backend, BackendError, Verdict};
use crate::prompt::AssembledPrompt;

pub const RULES_BACKEND: &str = "rules";

/// Categories the rule engine answers; everything else needs the LLM.
pub const RULE_CATEGORIES: [VulnCategory; 7] = [
    VulnCategory::Reentrancy,
    VulnCategory::MissingEvent,
    VulnCategory::TooManyDigits,
    VulnCategory::ErrorMessage,
    VulnCategory::ReturnValueCheck,
    VulnCategory::DivisionBeforeMultiplication,
    VulnCategory::ConstantOptimization,
];

/// Ignores the prompt and decides from the AST alone.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleBackend;

impl Backend for RuleBackend {
    fn id(&self) -> &'static str {
        RULES_BACKEND
    }

    fn detect(
        &self,
        category: VulnCategory,
        _prompt: &AssembledPrompt,
        model: &ProjectModel,
        target: &FunctionRef,
    ) -> Result<Verdict, BackendError> {
        rule_detect(category, model, target)
    }
}

pub fn rule_detect(
    category: VulnCategory,
    model: &ProjectModel,
    target: &FunctionRef,
) -> Result<Verdict, BackendError> {
    let id = target.id;
    if model.function_ref(id) != *target {
        return Err(BackendError::TargetMismatch(target.qualified()));
    }
    match category {
        VulnCategory::Reentrancy => Ok(rule_detect_reentrancy(model, target)),
        VulnCategory::MissingEvent => Ok(missing_event(model, target)),
        VulnCategory::TooManyDigits => Ok(first_expression(model, target, is_long_literal)),
        VulnCategory::ErrorMessage => Ok(first_expression(model, target, lacks_message)),
        VulnCategory::ReturnValueCheck => Ok(return_value_check(model, target)),
        VulnCategory::DivisionBeforeMultiplication => {
            Ok(first_expression(model, target, is_division_before_multiplication))
        }
        VulnCategory::ConstantOptimization => Ok(constant_optimization(model, target)),
        other => Err(BackendError::UnsupportedCategory(other)),
    }
}

/// Statements of a body in execution order: a compound statement comes
/// before the statements nested in it.
fn flatten(model: &ProjectModel, id: CallableId) -> Vec<&Statement> {
    let mut out = Vec::new();
    if let Some(body) = model.callable(id).body() {
        walk_block(body, &mut |s| out.push(s));
    }
    out
}

fn within(spans: &[Span], inner: Span) -> bool {
    spans.iter().any(|s| s.contains(&inner))
}

fn own_spans(stmt: &Statement) -> Vec<Span> {
    own_expressions(stmt).iter().map(|e| e.span()).collect()
}

/// Line of `span` relative to the first line of `target`.
fn relative_line(target: &FunctionRef, span: Span) -> Option<u32> {
    (span.file == target.span.file && target.span.contains(&span))
        .then(|| span.start_line - target.span.start_line + 1)
}

/// Text to quote for a finding inside `stmt`: the statement itself for
/// simple statements, the expression for compound ones.
fn snippet_for(model: &ProjectModel, stmt: &Statement, expr: &Expression) -> (String, Span) {
    let span = match stmt {
        Statement::If { .. }
        | Statement::For { .. }
        | Statement::While { .. }
        | Statement::DoWhile { .. }
        | Statement::Try { .. } => expr.span(),
        _ => stmt.span(),
    };
    (model.text(span).to_string(), span)
}

// ---- reentrancy ----

/// An external call that can hand control to untrusted code. Address
/// `transfer`/`send` forward only 2300 gas and do not count.
fn is_reentrant_call(edge: &CallEdge) -> bool {
    edge.kind == CallKind::External
        && !(edge.address_receiver && matches!(edge.callee_name.as_str(), "transfer" | "send"))
}

#[derive(Default)]
struct Scan {
    /// The callable performs a qualifying external call somewhere.
    has_call: bool,
    /// Text and span of the first statement that changes state or emits
    /// after such a call.
    finding: Option<(String, Span)>,
}

/// Whether the callable (or anything it reaches internally) writes state
/// or emits an event.
fn has_effects(model: &ProjectModel, id: CallableId, cache: &mut Vec<(CallableId, bool)>) -> bool {
    if let Some((_, b)) = cache.iter().find(|(c, _)| *c == id) {
        return *b;
    }
    let closure = model.call_graph.internal_closure(id);
    let emits = closure.iter().any(|c| {
        flatten(model, *c)
            .iter()
            .any(|s| matches!(s, Statement::Emit { .. }))
    });
    let result = emits || !writes_in_closure(model, id).is_empty();
    cache.push((id, result));
    result
}

fn scan(
    model: &ProjectModel,
    id: CallableId,
    visiting: &mut HashSet<CallableId>,
    cache: &mut Vec<(CallableId, bool)>,
) -> Scan {
    let mut result = Scan::default();
    if !visiting.insert(id) {
        return result;
    }
    let scope = FunctionScope::new(model, id);
    let edges: Vec<&CallEdge> = model.call_graph.edges_from(id).collect();
    for stmt in flatten(model, id) {
        let spans = own_spans(stmt);
        let here: Vec<&&CallEdge> = edges.iter().filter(|e| within(&spans, e.span)).collect();

        if result.has_call {
            let writes = own_expressions(stmt)
                .iter()
                .any(|e| !scope.written_state_vars(e).is_empty());
            let emits = matches!(stmt, Statement::Emit { .. });
            let helper_effects = here.iter().any(|e| {
                matches!(e.kind, CallKind::Internal | CallKind::SuperCall)
                    && e.callee
                        .as_ref()
                        .is_some_and(|c| has_effects(model, c.id, cache))
            });
            if writes || emits || helper_effects {
                let span = stmt.span();
                result.finding = Some((model.text(span).to_string(), span));
                break;
            }
        }

        for edge in here {
            if is_reentrant_call(edge) {
                result.has_call = true;
            } else if matches!(edge.kind, CallKind::Internal | CallKind::SuperCall) {
                if let Some(callee) = &edge.callee {
                    let inner = scan(model, callee.id, visiting, cache);
                    if inner.finding.is_some() {
                        visiting.remove(&id);
                        return inner;
                    }
                    result.has_call |= inner.has_call;
                }
            }
        }
    }
    visiting.remove(&id);
    result
}

/// Reentrancy rules:
/// 1. a `nonReentrant` modifier makes the target safe;
/// 2. address `transfer`/`send` are not qualifying external calls;
/// 3. `super` calls and emits are not external calls;
/// 4. a qualifying call followed by a state write or an emit is vulnerable,
///    quoting the first such statement;
/// 5. a qualifying call with nothing after it is safe.
///
/// Calls and effects inside internal helpers count as if they were inline.
pub fn rule_detect_reentrancy(model: &ProjectModel, target: &FunctionRef) -> Verdict {
    let Some(f) = model.callable(target.id).as_function() else {
        return Verdict::safe(RULES_BACKEND);
    };
    if f
        .modifiers
        .iter()
        .any(|m| m.name.to_ascii_lowercase().contains("nonreentrant"))
    {
        return Verdict::safe(RULES_BACKEND);
    }
    let mut cache = Vec::new();
    match scan(model, target.id, &mut HashSet::new(), &mut cache).finding {
        Some((text, span)) => Verdict::vulnerable(RULES_BACKEND, text, relative_line(target, span)),
        None => Verdict::safe(RULES_BACKEND),
    }
}

// ---- syntactic rules ----

fn first_expression(
    model: &ProjectModel,
    target: &FunctionRef,
    pred: fn(&Expression) -> bool,
) -> Verdict {
    for stmt in flatten(model, target.id) {
        for root in own_expressions(stmt) {
            let mut hit = None;
            walk_expression(root, &mut |e| {
                if hit.is_none() && pred(e) {
                    hit = Some(e);
                }
            });
            if let Some(e) = hit {
                let (text, span) = snippet_for(model, stmt, e);
                return Verdict::vulnerable(RULES_BACKEND, text, relative_line(target, span));
            }
        }
    }
    Verdict::safe(RULES_BACKEND)
}

fn is_empty_string(e: &Expression) -> bool {
    matches!(
        e,
        Expression::Literal { literal_kind: LiteralKind::String, value, .. }
            if value.len() == 2
    )
}

/// `require(c)`, `require(c, "")`, `revert()` and `revert("")`.
fn lacks_message(e: &Expression) -> bool {
    let Expression::FunctionCall {
        callee, arguments, ..
    } = e
    else {
        return false;
    };
    match callee.as_identifier() {
        Some("require") => arguments.len() < 2 || is_empty_string(&arguments[1]),
        Some("revert") => arguments.is_empty() || is_empty_string(&arguments[0]),
        _ => false,
    }
}

fn missing_event(model: &ProjectModel, target: &FunctionRef) -> Verdict {
    let Some(f) = model.callable(target.id).as_function() else {
        return Verdict::safe(RULES_BACKEND);
    };
    if f.function_kind != FunctionKind::Function
        || !f.visibility.is_entry_point()
        || matches!(f.mutability, Mutability::View | Mutability::Pure)
        || writes_in_closure(model, target.id).is_empty()
    {
        return Verdict::safe(RULES_BACKEND);
    }
    let closure = model.call_graph.internal_closure(target.id);
    let emits = closure.iter().any(|c| {
        flatten(model, *c)
            .iter()
            .any(|s| matches!(s, Statement::Emit { .. }))
    });
    if emits {
        return Verdict::safe(RULES_BACKEND);
    }
    // quote the first statement that changes state, directly or via a helper
    let scope = FunctionScope::new(model, target.id);
    let edges: Vec<&CallEdge> = model.call_graph.edges_from(target.id).collect();
    for stmt in flatten(model, target.id) {
        let spans = own_spans(stmt);
        for e in own_expressions(stmt) {
            let direct = !scope.written_state_vars(e).is_empty();
            let via_helper = edges.iter().any(|edge| {
                within(&spans, edge.span)
                    && edge
                        .callee
                        .as_ref()
                        .is_some_and(|c| !writes_in_closure(model, c.id).is_empty())
            });
            if direct || via_helper {
                let (text, span) = snippet_for(model, stmt, e);
                return Verdict::vulnerable(RULES_BACKEND, text, relative_line(target, span));
            }
        }
    }
    Verdict::vulnerable(RULES_BACKEND, model.text(target.span), Some(1))
}

fn is_low_level_call(edge: &CallEdge) -> bool {
    edge.kind == CallKind::External
        && edge.address_receiver
        && matches!(edge.callee_name.as_str(), "call" | "delegatecall" | "staticcall")
}

fn return_value_check(model: &ProjectModel, target: &FunctionRef) -> Verdict {
    let edges: Vec<&CallEdge> = model.call_graph.edges_from(target.id).collect();
    let low_level_at = |e: &Expression| {
        let span = e.strip_parens().span();
        edges.iter().any(|edge| edge.span == span && is_low_level_call(edge))
    };
    for stmt in flatten(model, target.id) {
        let hit = match stmt {
            Statement::Expression { expression, .. } => {
                discards_return_value(model, target.id, expression)
                    || match expression {
                        Expression::Assignment { left, right, .. } => {
                            low_level_at(right)
                                && matches!(left.as_ref(), Expression::Tuple { components, .. }
                                    if components.first().is_some_and(Option::is_none))
                        }
                        _ => false,
                    }
            }
            Statement::VariableDeclaration {
                declarations,
                initial_value: Some(init),
                ..
            } => low_level_at(init) && declarations.first().is_some_and(Option::is_none),
            _ => false,
        };
        if hit {
            let span = stmt.span();
            return Verdict::vulnerable(
                RULES_BACKEND,
                model.text(span),
                relative_line(target, span),
            );
        }
    }
    Verdict::safe(RULES_BACKEND)
}

fn constant_optimization(model: &ProjectModel, target: &FunctionRef) -> Verdict {
    let eligible = constant_eligible_vars(model);
    let scope = FunctionScope::new(model, target.id);
    for stmt in flatten(model, target.id) {
        for e in own_expressions(stmt) {
            if let Some(v) = scope
                .referenced_state_vars(e)
                .into_iter()
                .find(|v| eligible.contains(v))
            {
                let decl = model.state_var(v);
                return Verdict::vulnerable(RULES_BACKEND, model.text(decl.span), None);
            }
        }
    }
    Verdict::safe(RULES_BACKEND)
}
