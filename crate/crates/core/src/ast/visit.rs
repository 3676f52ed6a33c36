// SPDX-License-Identifier: Apache-2.0

//! Pre-order traversal helpers over statements and expressions.

use super::nodes::{Block, Expression, Statement};

/// Expressions held directly by `stmt` (not those of nested statements).
pub fn own_expressions(stmt: &Statement) -> Vec<&Expression> {
    match stmt {
        Statement::Expression { expression, .. } => vec![expression],
        Statement::VariableDeclaration { initial_value, .. } => initial_value.iter().collect(),
        Statement::If { condition, .. } => vec![condition],
        Statement::For {
            condition, update, ..
        } => condition.iter().chain(update.iter()).collect(),
        Statement::While { condition, .. } | Statement::DoWhile { condition, .. } => {
            vec![condition]
        }
        Statement::Return { expression, .. } => expression.iter().collect(),
        Statement::Emit { event_call, .. } => vec![event_call],
        Statement::Revert { error_call, .. } => vec![error_call],
        Statement::Try { expression, .. } => vec![expression],
        Statement::Block { .. }
        | Statement::Unchecked { .. }
        | Statement::Break { .. }
        | Statement::Continue { .. }
        | Statement::Placeholder { .. }
        | Statement::InlineAssembly { .. } => Vec::new(),
    }
}

/// Statements nested directly inside `stmt`, in source order.
pub fn child_statements(stmt: &Statement) -> Vec<&Statement> {
    match stmt {
        Statement::Block { statements, .. } | Statement::Unchecked { statements, .. } => {
            statements.iter().collect()
        }
        Statement::If {
            true_body,
            false_body,
            ..
        } => std::iter::once(true_body.as_ref())
            .chain(false_body.as_deref())
            .collect(),
        Statement::For { init, body, .. } => {
            init.as_deref().into_iter().chain([body.as_ref()]).collect()
        }
        Statement::While { body, .. } | Statement::DoWhile { body, .. } => vec![body],
        Statement::Try {
            body,
            catch_clauses,
            ..
        } => body
            .statements
            .iter()
            .chain(catch_clauses.iter().flat_map(|c| c.body.statements.iter()))
            .collect(),
        _ => Vec::new(),
    }
}

/// Visit `stmt` and every statement nested in it, pre-order.
pub fn walk_statement<'a>(stmt: &'a Statement, f: &mut impl FnMut(&'a Statement)) {
    f(stmt);
    for child in child_statements(stmt) {
        walk_statement(child, f);
    }
}

pub fn walk_block<'a>(block: &'a Block, f: &mut impl FnMut(&'a Statement)) {
    for s in &block.statements {
        walk_statement(s, f);
    }
}

/// Direct sub-expressions of `expr`, left to right.
pub fn child_expressions(expr: &Expression) -> Vec<&Expression> {
    match expr {
        Expression::Identifier { .. }
        | Expression::ElementaryType { .. }
        | Expression::Literal { .. }
        | Expression::New { .. } => Vec::new(),
        Expression::FunctionCall {
            callee, arguments, ..
        } => std::iter::once(callee.as_ref()).chain(arguments).collect(),
        Expression::FunctionCallOptions {
            expression, values, ..
        } => std::iter::once(expression.as_ref()).chain(values).collect(),
        Expression::MemberAccess { expression, .. } => vec![expression],
        Expression::IndexAccess { base, index, .. } => {
            std::iter::once(base.as_ref()).chain(index.as_deref()).collect()
        }
        Expression::IndexRange {
            base, start, end, ..
        } => std::iter::once(base.as_ref())
            .chain(start.as_deref())
            .chain(end.as_deref())
            .collect(),
        Expression::Assignment { left, right, .. }
        | Expression::BinaryOperation { left, right, .. } => vec![left, right],
        Expression::UnaryOperation { operand, .. } => vec![operand],
        Expression::Conditional {
            condition,
            true_expression,
            false_expression,
            ..
        } => vec![condition, true_expression, false_expression],
        Expression::Tuple { components, .. } => components.iter().flatten().collect(),
        Expression::ArrayLiteral { components, .. } => components.iter().collect(),
    }
}

/// Visit `expr` and all of its sub-expressions, pre-order.
pub fn walk_expression<'a>(expr: &'a Expression, f: &mut impl FnMut(&'a Expression)) {
    f(expr);
    for child in child_expressions(expr) {
        walk_expression(child, f);
    }
}

/// Visit every expression (at any depth) inside a statement tree.
pub fn walk_statement_expressions<'a>(stmt: &'a Statement, f: &mut impl FnMut(&'a Expression)) {
    walk_statement(stmt, &mut |s| {
        for e in own_expressions(s) {
            walk_expression(e, f);
        }
    });
}

pub fn walk_block_expressions<'a>(block: &'a Block, f: &mut impl FnMut(&'a Expression)) {
    for s in &block.statements {
        walk_statement_expressions(s, f);
    }
}
