// SPDX-License-Identifier: Apache-2.0

//! Fine-grained context extraction: the twelve-field bundle handed to the
//! prompt's Input section.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::visit::{own_expressions, walk_block};
use crate::ast::{FunctionKind, Statement};
use crate::project::{
    CallEdge, CallGraph, CallKind, CallableId, FunctionRef, FunctionScope, ProjectModel,
    StateVarId, VulnCategory,
};

pub const DEFAULT_DEPTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("target function `{0}` not found in the project")]
    NotFound(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallstackEntry {
    pub signature: String,
    /// Verbatim definition, empty for callees outside the retained set.
    pub source: String,
}

/// Field names and order are part of the JSON contract.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextBundle {
    pub imports: Vec<String>,
    pub internal_states: Vec<String>,
    pub target_function: String,
    pub callstack: Vec<CallstackEntry>,
    pub modifiers: Vec<String>,
    pub modifiers_codes: Vec<String>,
    pub constructor: String,
    pub initializer: String,
    pub internal_calls: Vec<String>,
    pub external_calls: Vec<String>,
    pub external_objects: Vec<String>,
    pub events: Vec<String>,
}

pub const BUNDLE_FIELDS: [&str; 12] = [
    "imports",
    "internal_states",
    "target_function",
    "callstack",
    "modifiers",
    "modifiers_codes",
    "constructor",
    "initializer",
    "internal_calls",
    "external_calls",
    "external_objects",
    "events",
];

/// Canonical JSON: two-space indentation, fixed key order, trailing newline.
pub fn bundle_to_json(bundle: &ContextBundle) -> String {
    let mut text = serde_json::to_string_pretty(bundle).expect("bundle serializes");
    text.push('\n');
    text
}

pub fn bundle_from_json(text: &str) -> Result<ContextBundle, serde_json::Error> {
    serde_json::from_str(text)
}

/// A callstack member: a definition in the retained set or just a name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CallTarget {
    Resolved(FunctionRef),
    Unresolved(String),
}

impl CallTarget {
    pub fn signature(&self) -> String {
        match self {
            CallTarget::Resolved(f) => f.qualified(),
            CallTarget::Unresolved(s) => s.clone(),
        }
    }
}

/// Functions reachable from `target` through internal and `super` calls,
/// breadth-first, at most `depth` calls away. The target itself is left
/// out and each signature appears once.
pub fn collect_callstack(graph: &CallGraph, target: CallableId, depth: usize) -> Vec<CallTarget> {
    let mut out: Vec<CallTarget> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut visited: HashSet<CallableId> = HashSet::from([target]);
    let mut frontier = vec![target];
    for _ in 0..depth {
        let mut next = Vec::new();
        for caller in frontier {
            for edge in graph.edges_from(caller) {
                let entry = match (edge.kind, &edge.callee) {
                    (CallKind::Internal | CallKind::SuperCall, Some(callee)) => {
                        if !visited.insert(callee.id) {
                            continue;
                        }
                        next.push(callee.id);
                        CallTarget::Resolved(callee.clone())
                    }
                    (CallKind::Internal | CallKind::SuperCall | CallKind::Unresolved, None) => {
                        CallTarget::Unresolved(edge.signature())
                    }
                    _ => continue,
                };
                if seen.insert(entry.signature()) {
                    out.push(entry);
                }
            }
        }
        frontier = next;
    }
    out
}

fn locate(model: &ProjectModel, target: &FunctionRef) -> Option<CallableId> {
    let unit = model.units.iter().position(|u| u.path == target.file)?;
    let contract = model
        .contract_ids()
        .find(|c| c.unit == unit && model.contract(*c).name == target.contract)?;
    model
        .contract(contract)
        .functions
        .iter()
        .enumerate()
        .find(|(_, f)| f.display_name() == target.name && f.signature() == target.signature)
        .map(|(index, _)| CallableId::Function { contract, index })
}

fn push_unique(list: &mut Vec<String>, item: String) {
    if !list.contains(&item) {
        list.push(item);
    }
}

/// Build the bundle for `target`. Extraction is identical for every
/// category; `category` only shows up in log output.
pub fn extract_context(
    model: &ProjectModel,
    target: &FunctionRef,
    category: VulnCategory,
    depth: usize,
) -> Result<ContextBundle, ContextError> {
    let id = locate(model, target).ok_or_else(|| ContextError::NotFound(target.qualified()))?;
    log::debug!("extracting {} for {category} at depth {depth}", target.qualified());
    let contract_id = id.contract();
    let contract = model.contract(contract_id);
    let function = model
        .callable(id)
        .as_function()
        .expect("located a function");
    let unit = model.unit(contract_id);

    let mut bundle = ContextBundle {
        imports: unit
            .ast
            .imports
            .iter()
            .map(|i| model.text(i.span).to_string())
            .collect(),
        target_function: model.text(function.span).to_string(),
        ..ContextBundle::default()
    };

    let callstack = collect_callstack(&model.call_graph, id, depth);
    let mut members = vec![id];
    for entry in &callstack {
        let source = match entry {
            CallTarget::Resolved(f) => {
                members.push(f.id);
                model.text(f.span).to_string()
            }
            CallTarget::Unresolved(_) => String::new(),
        };
        bundle.callstack.push(CallstackEntry {
            signature: entry.signature(),
            source,
        });
    }

    let mut modifier_ids = Vec::new();
    for inv in &function.modifiers {
        bundle.modifiers.push(model.text(inv.span).to_string());
        if let Some(m) = model.lookup_modifier(contract_id, &inv.name) {
            if !modifier_ids.contains(&m) {
                modifier_ids.push(m);
                bundle
                    .modifiers_codes
                    .push(model.text(model.callable(m).span()).to_string());
            }
        }
    }

    if let Some(ctor) = contract.constructor() {
        bundle.constructor = model.text(ctor.span).to_string();
    }
    bundle.initializer = model
        .known_bases(contract_id)
        .flat_map(|c| model.contract(c).functions.iter())
        .find(|f| {
            f.function_kind == FunctionKind::Function
                && (f.name == "initialize" || f.has_modifier("initializer"))
        })
        .map(|f| model.text(f.span).to_string())
        .unwrap_or_default();

    for member in &members {
        for edge in model.call_graph.edges_from(*member) {
            match edge.kind {
                CallKind::Internal | CallKind::SuperCall => {
                    if edge.callee.is_some() {
                        push_unique(&mut bundle.internal_calls, edge.signature());
                    }
                }
                CallKind::External => add_external(&mut bundle, edge),
                _ => {}
            }
        }
    }

    let mut closure = members.clone();
    closure.extend(modifier_ids.iter().copied());
    bundle.internal_states = state_declarations(model, &closure);
    bundle.events = events(model, contract_id, &closure);
    Ok(bundle)
}

fn add_external(bundle: &mut ContextBundle, edge: &CallEdge) {
    push_unique(&mut bundle.external_calls, edge.call_text.clone());
    if let Some(r) = &edge.receiver {
        push_unique(&mut bundle.external_objects, r.clone());
    }
}

/// Declaration texts of state variables referenced anywhere in `closure`,
/// in declaration order.
fn state_declarations(model: &ProjectModel, closure: &[CallableId]) -> Vec<String> {
    let mut vars: Vec<StateVarId> = Vec::new();
    for id in closure {
        let Some(body) = model.callable(*id).body() else {
            continue;
        };
        let scope = FunctionScope::new(model, *id);
        walk_block(body, &mut |s| {
            for e in own_expressions(s) {
                vars.extend(scope.referenced_state_vars(e));
            }
        });
    }
    vars.sort();
    vars.dedup();
    vars.into_iter()
        .map(|v| model.text(model.state_var(v).span).to_string())
        .collect()
}

/// Definitions of emitted events followed by the emit statements themselves.
fn events(model: &ProjectModel, contract: crate::project::ContractId, closure: &[CallableId]) -> Vec<String> {
    let mut definitions = Vec::new();
    let mut emits = Vec::new();
    for id in closure {
        let Some(body) = model.callable(*id).body() else {
            continue;
        };
        walk_block(body, &mut |s| {
            let Statement::Emit { event_call, span } = s else {
                return;
            };
            push_unique(&mut emits, model.text(*span).to_string());
            if let crate::ast::Expression::FunctionCall { callee, .. } = event_call {
                let name = model.text(callee.span());
                let short = name.rsplit('.').next().unwrap_or(name);
                if let Some((_, def)) = model.lookup_event(contract, short) {
                    push_unique(&mut definitions, model.text(def.span).to_string());
                }
            }
        });
    }
    definitions.extend(emits);
    definitions
}
