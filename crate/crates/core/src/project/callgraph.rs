// SPDX-License-Identifier: Apache-2.0

//! Call graph over every function and modifier body of the retained set.

use std::collections::HashMap;

use serde::Serialize;

use crate::ast::visit::{child_expressions, own_expressions, walk_block};
use crate::ast::{Expression, Span, Statement};

use super::scope::{FunctionScope, Resolved, ValueType};
use super::{CallableId, FunctionRef, ProjectModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CallKind {
    Internal,
    External,
    EventEmit,
    SuperCall,
    /// Language builtins: `require`, `keccak256`, type conversions, struct
    /// and error constructors, `abi.*`, array `push`/`pop`, `new`.
    Builtin,
    Unresolved,
}

/// One call site.
#[derive(Debug, Clone, Serialize)]
pub struct CallEdge {
    pub caller: FunctionRef,
    pub kind: CallKind,
    /// The resolved callee definition, when there is one in the retained set.
    pub callee: Option<FunctionRef>,
    /// Called function or member name, e.g. `transfer` or `_update`.
    pub callee_name: String,
    /// Receiver expression text of member calls, e.g. `token`.
    pub receiver: Option<String>,
    /// Whether the receiver is a plain address (low-level call).
    pub address_receiver: bool,
    pub argument_count: usize,
    /// The whole call expression, verbatim.
    pub call_text: String,
    pub span: Span,
}

impl CallEdge {
    /// Signature used in listings: the resolved callee's `C.f(types)`,
    /// otherwise `receiver.name`, the bare name, or the call text.
    pub fn signature(&self) -> String {
        match &self.callee {
            Some(c) => c.qualified(),
            None => match &self.receiver {
                Some(r) => format!("{r}.{}", self.callee_name),
                None if self.callee_name.is_empty() => self.call_text.clone(),
                None => self.callee_name.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CallGraph {
    pub nodes: Vec<FunctionRef>,
    pub edges: Vec<CallEdge>,
    #[serde(skip)]
    by_caller: HashMap<CallableId, Vec<usize>>,
}

impl CallGraph {
    /// Call sites inside `caller`, in source order.
    pub fn edges_from(&self, caller: CallableId) -> impl Iterator<Item = &CallEdge> {
        self.by_caller
            .get(&caller)
            .into_iter()
            .flatten()
            .map(|i| &self.edges[*i])
    }

    pub fn external_edges_from(&self, caller: CallableId) -> impl Iterator<Item = &CallEdge> {
        self.edges_from(caller)
            .filter(|e| e.kind == CallKind::External)
    }

    /// `root` plus every callable reachable from it through resolved
    /// internal and `super` edges, breadth-first.
    pub fn internal_closure(&self, root: CallableId) -> Vec<CallableId> {
        let mut seen = vec![root];
        let mut i = 0;
        while i < seen.len() {
            let next: Vec<CallableId> = self
                .edges_from(seen[i])
                .filter(|e| matches!(e.kind, CallKind::Internal | CallKind::SuperCall))
                .filter_map(|e| e.callee.as_ref().map(|c| c.id))
                .collect();
            for n in next {
                if !seen.contains(&n) {
                    seen.push(n);
                }
            }
            i += 1;
        }
        seen
    }
}

pub fn build_call_graph(model: &ProjectModel) -> CallGraph {
    let mut graph = CallGraph::default();
    for id in model.callable_ids() {
        let caller = model.function_ref(id);
        graph.nodes.push(caller.clone());
        let Some(body) = model.callable(id).body() else {
            continue;
        };
        let scope = FunctionScope::new(model, id);
        let mut builder = EdgeBuilder {
            model,
            scope: &scope,
            caller: &caller,
            edges: Vec::new(),
        };
        walk_block(body, &mut |stmt| builder.statement(stmt));
        let start = graph.edges.len();
        graph
            .by_caller
            .insert(id, (start..start + builder.edges.len()).collect());
        graph.edges.extend(builder.edges);
    }
    graph
}

const BUILTIN_FUNCTIONS: &[&str] = &[
    "addmod",
    "assert",
    "blockhash",
    "ecrecover",
    "gasleft",
    "keccak256",
    "mulmod",
    "payable",
    "require",
    "revert",
    "ripemd160",
    "selfdestruct",
    "sha256",
    "sha3",
    "suicide",
    "type",
];

const BUILTIN_NAMESPACES: &[&str] = &["abi", "block", "msg", "tx", "bytes", "string"];

/// Members that make a call to another account when invoked on an address.
const ADDRESS_CALLS: &[&str] = &[
    "call",
    "delegatecall",
    "staticcall",
    "transfer",
    "send",
    "sendValue",
    "functionCall",
    "functionCallWithValue",
    "functionStaticCall",
    "functionDelegateCall",
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Context {
    Plain,
    Emit,
    Revert,
}

struct EdgeBuilder<'a> {
    model: &'a ProjectModel,
    scope: &'a FunctionScope<'a>,
    caller: &'a FunctionRef,
    edges: Vec<CallEdge>,
}

impl EdgeBuilder<'_> {
    fn statement(&mut self, stmt: &Statement) {
        let ctx = match stmt {
            Statement::Emit { .. } => Context::Emit,
            Statement::Revert { .. } => Context::Revert,
            _ => Context::Plain,
        };
        for e in own_expressions(stmt) {
            self.expression(e, ctx);
        }
    }

    /// `ctx` applies only to the outermost call of an emit/revert statement.
    fn expression(&mut self, expr: &Expression, ctx: Context) {
        if let Expression::FunctionCall {
            callee, arguments, ..
        } = expr
        {
            let edge = self.classify(expr, callee, arguments.len(), ctx);
            self.edges.push(edge);
        }
        for child in child_expressions(expr) {
            self.expression(child, Context::Plain);
        }
    }

    fn edge(&self, call: &Expression, kind: CallKind, name: &str, argc: usize) -> CallEdge {
        let span = call.span();
        CallEdge {
            caller: self.caller.clone(),
            kind,
            callee: None,
            callee_name: name.to_string(),
            receiver: None,
            address_receiver: false,
            argument_count: argc,
            call_text: self.model.text(span).to_string(),
            span,
        }
    }

    fn classify(&self, call: &Expression, callee: &Expression, argc: usize, ctx: Context) -> CallEdge {
        let mut target = callee.strip_parens();
        while let Expression::FunctionCallOptions { expression, .. } = target {
            target = expression.strip_parens();
        }
        let model = self.model;
        let scope = self.scope;
        let contract = scope.contract;
        match target {
            Expression::Identifier { name, .. } => {
                let mut edge = self.edge(call, CallKind::Unresolved, name, argc);
                if ctx == Context::Emit {
                    edge.kind = CallKind::EventEmit;
                    return edge;
                }
                if let Some(f) = model.lookup_function(contract, name, argc) {
                    if scope.resolve(name) != Resolved::Local {
                        edge.kind = CallKind::Internal;
                        edge.callee = Some(model.function_ref(f));
                        return edge;
                    }
                }
                if ctx == Context::Revert
                    || BUILTIN_FUNCTIONS.contains(&name.as_str())
                    || model.is_plain_type_name(contract, name)
                    || model.lookup_struct(contract, name).is_some()
                    || matches!(scope.resolve(name), Resolved::Contract(_))
                {
                    edge.kind = CallKind::Builtin;
                }
                edge
            }
            Expression::ElementaryType { name, .. } => self.edge(call, CallKind::Builtin, name, argc),
            Expression::New { .. } => self.edge(call, CallKind::Builtin, "new", argc),
            Expression::MemberAccess {
                expression: base,
                member,
                ..
            } => {
                let mut edge = self.edge(call, CallKind::Unresolved, member, argc);
                edge.receiver = Some(model.text(base.span()).to_string());
                if ctx == Context::Emit {
                    edge.kind = CallKind::EventEmit;
                    return edge;
                }
                if ctx == Context::Revert {
                    edge.kind = CallKind::Builtin;
                    return edge;
                }
                let base_name = base.as_identifier();
                if base_name == Some("super") {
                    edge.kind = CallKind::SuperCall;
                    edge.callee = model
                        .lookup_super_function(contract, member, argc)
                        .map(|f| model.function_ref(f));
                    return edge;
                }
                if base_name == Some("this") {
                    edge.kind = CallKind::External;
                    edge.callee = model
                        .lookup_function(contract, member, argc)
                        .map(|f| model.function_ref(f));
                    return edge;
                }
                if let Some(b) = base_name {
                    if BUILTIN_NAMESPACES.contains(&b) && scope.resolve(b) == Resolved::Other {
                        edge.kind = CallKind::Builtin;
                        return edge;
                    }
                    if let Resolved::Contract(id) = scope.resolve(b) {
                        // `Lib.f()` or an explicit base `Base.f()`
                        if let Some(f) = model.lookup_function(id, member, argc) {
                            edge.kind = CallKind::Internal;
                            edge.callee = Some(model.function_ref(f));
                        } else if model.contract(id).events.iter().any(|e| &e.name == member)
                            || model.contract(id).errors.iter().any(|e| &e.name == member)
                            || model.contract(id).structs.iter().any(|e| &e.name == member)
                        {
                            edge.kind = CallKind::Builtin;
                        }
                        return edge;
                    }
                }
                let ty = scope.type_of(base);
                if ty == ValueType::Address && ADDRESS_CALLS.contains(&member.as_str()) {
                    edge.kind = CallKind::External;
                    edge.address_receiver = true;
                    return edge;
                }
                if let Some(f) = self.using_for(member, argc) {
                    edge.kind = CallKind::Internal;
                    edge.callee = Some(model.function_ref(f));
                    return edge;
                }
                match ty {
                    ValueType::Array(_) | ValueType::Bytes
                        if matches!(member.as_str(), "push" | "pop" | "concat") =>
                    {
                        edge.kind = CallKind::Builtin;
                    }
                    ValueType::Contract(id, _) => {
                        edge.kind = CallKind::External;
                        edge.callee = id
                            .and_then(|id| model.lookup_function(id, member, argc))
                            .map(|f| model.function_ref(f));
                    }
                    _ => {}
                }
                edge
            }
            _ => self.edge(call, CallKind::Unresolved, "", argc),
        }
    }

    /// Library function reachable through a `using L for T` directive of the
    /// current contract or one of its bases.
    fn using_for(&self, member: &str, argc: usize) -> Option<CallableId> {
        let model = self.model;
        let contract = self.scope.contract;
        model.known_bases(contract).find_map(|cid| {
            model.contract(cid).using_for.iter().find_map(|u| {
                let lib = model.resolve_contract(&u.library, cid.unit)?;
                if !model.is_library(lib) {
                    return None;
                }
                model.lookup_function(lib, member, argc + 1)
            })
        })
    }
}
