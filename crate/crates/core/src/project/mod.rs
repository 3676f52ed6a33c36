// SPDX-License-Identifier: Apache-2.0

//! Whole-project view: coarse file filtering, contract table, import graph,
//! inheritance linearization and call graph.

mod callgraph;
mod candidates;
mod category;
mod filter;
mod linearize;
mod scope;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::{Component, Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;

use crate::ast::{
    parse_source_unit, Block, ContractDefinition, ContractKind, EventDefinition, FileId,
    FunctionDefinition, ModifierDefinition, SourceUnit, Span, StateVariable, StructDefinition,
    VariableDeclaration,
};

pub use callgraph::{build_call_graph, CallEdge, CallGraph, CallKind};
pub use candidates::candidate_functions;
pub(crate) use candidates::{
    constant_eligible_vars, discards_return_value, is_division_before_multiplication,
    is_long_literal, writes_in_closure,
};
pub use category::{CategoryInfo, CategoryMetadata, MetadataError, UnknownCategory, VulnCategory};
pub use filter::{default_rules, ExcludeRule, FilterConfig};
pub use linearize::{linearize_all, LinearizationError};
pub use scope::{FunctionScope, Resolved, ValueType};

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("no .sol files found under {0}")]
    NoSourcesFound(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid filter configuration: {0}")]
    Config(String),
    #[error("function `{0}` not found")]
    NotFound(String),
    #[error("`{target}` is ambiguous; candidates: {}", candidates.join(", "))]
    AmbiguousTarget {
        target: String,
        candidates: Vec<String>,
    },
}

/// A parsed, retained source file.
#[derive(Debug, Clone)]
pub struct LoadedUnit {
    pub path: String,
    pub source: String,
    pub ast: SourceUnit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exclusion {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDiagnostic {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContractId {
    pub unit: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CallableId {
    Function { contract: ContractId, index: usize },
    Modifier { contract: ContractId, index: usize },
}

impl CallableId {
    pub fn contract(self) -> ContractId {
        match self {
            CallableId::Function { contract, .. } | CallableId::Modifier { contract, .. } => {
                contract
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVarId {
    pub contract: ContractId,
    pub index: usize,
}

/// Entry of a linearized base list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseRef {
    Known(ContractId),
    /// A base whose definition is not among the retained files.
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CallableKind {
    Function,
    Modifier,
}

/// Stable handle to a function or modifier of the retained set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FunctionRef {
    pub file: String,
    pub contract: String,
    pub name: String,
    /// Canonical parameter types, e.g. `(uint256,address)`.
    pub signature: String,
    pub kind: CallableKind,
    pub span: Span,
    #[serde(skip)]
    pub id: CallableId,
}

impl FunctionRef {
    /// `Contract.name(types)`
    pub fn qualified(&self) -> String {
        format!("{}.{}{}", self.contract, self.name, self.signature)
    }
}

impl fmt::Display for FunctionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.qualified())
    }
}

/// Borrowed view of a function or modifier definition.
#[derive(Debug, Clone, Copy)]
pub enum Callable<'a> {
    Function(&'a FunctionDefinition),
    Modifier(&'a ModifierDefinition),
}

impl<'a> Callable<'a> {
    pub fn body(&self) -> Option<&'a Block> {
        match self {
            Callable::Function(f) => f.body.as_ref(),
            Callable::Modifier(m) => m.body.as_ref(),
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Callable::Function(f) => f.span,
            Callable::Modifier(m) => m.span,
        }
    }

    pub fn name(&self) -> &'a str {
        match self {
            Callable::Function(f) => f.display_name(),
            Callable::Modifier(m) => &m.name,
        }
    }

    pub fn parameters(&self) -> &'a [VariableDeclaration] {
        match self {
            Callable::Function(f) => &f.parameters,
            Callable::Modifier(m) => &m.parameters,
        }
    }

    pub fn returns(&self) -> &'a [VariableDeclaration] {
        match self {
            Callable::Function(f) => &f.returns,
            Callable::Modifier(_) => &[],
        }
    }

    pub fn as_function(&self) -> Option<&'a FunctionDefinition> {
        match self {
            Callable::Function(f) => Some(f),
            Callable::Modifier(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectModel {
    pub root: PathBuf,
    /// Retained, successfully parsed files sorted by path. The position of a
    /// unit equals its [`FileId`].
    pub units: Vec<LoadedUnit>,
    pub excluded: Vec<Exclusion>,
    /// Parse failures and other non-fatal problems.
    pub diagnostics: Vec<FileDiagnostic>,
    /// Project-relative file -> resolved imported files.
    pub imports: BTreeMap<String, Vec<String>>,
    pub call_graph: CallGraph,
    contract_table: BTreeMap<String, ContractId>,
    by_name: HashMap<String, Vec<ContractId>>,
    linearization: HashMap<ContractId, Vec<BaseRef>>,
}

/// Walk `root`, apply the coarse filter, parse what remains and build the
/// linearization and call graph.
pub fn load_project(root: &Path, filter: &FilterConfig) -> Result<ProjectModel, ProjectError> {
    if !root.is_dir() {
        return Err(ProjectError::Io {
            path: root.display().to_string(),
            message: "not a directory".into(),
        });
    }
    let compiled = filter.compile()?;
    let mut all = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| ProjectError::Io {
            path: root.display().to_string(),
            message: e.to_string(),
        })?;
        if !entry.file_type().is_file() || entry.path().extension().is_none_or(|e| e != "sol") {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walkdir stays under root")
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        all.push(rel);
    }
    if all.is_empty() {
        return Err(ProjectError::NoSourcesFound(root.display().to_string()));
    }
    all.sort();
    let mut retained = Vec::new();
    let mut excluded = Vec::new();
    for path in &all {
        match compiled.exclusion_reason(path) {
            Some(reason) => excluded.push(Exclusion {
                path: path.clone(),
                reason: reason.to_string(),
            }),
            None => retained.push(path.clone()),
        }
    }
    let sources: Vec<(String, Result<String, String>)> = retained
        .par_iter()
        .map(|p| {
            let text = std::fs::read(root.join(p))
                .map_err(|e| e.to_string())
                .and_then(|b| String::from_utf8(b).map_err(|_| "file is not valid UTF-8".into()));
            (p.clone(), text)
        })
        .collect();
    let mut ok = Vec::new();
    let mut diagnostics = Vec::new();
    for (path, text) in sources {
        match text {
            Ok(t) => ok.push((path, t)),
            Err(message) => diagnostics.push(FileDiagnostic { path, message }),
        }
    }
    let mut model = ProjectModel::build(root.to_path_buf(), ok, &all, diagnostics);
    model.excluded = excluded;
    Ok(model)
}

/// Per-contract linearization, by qualified contract name, as simple names.
pub fn linearize_inheritance(
    model: &ProjectModel,
) -> Result<BTreeMap<String, Vec<String>>, LinearizationError> {
    let (lin, errors) = compute_linearization(model);
    if let Some((_, e)) = errors.into_iter().min_by_key(|(id, _)| *id) {
        return Err(e);
    }
    Ok(model
        .contract_ids()
        .map(|id| {
            let names = lin[&id].iter().map(|b| model.base_name(b)).collect();
            (model.qualified_name(id), names)
        })
        .collect())
}

type LinResult = (
    HashMap<ContractId, Vec<BaseRef>>,
    Vec<(ContractId, LinearizationError)>,
);

fn compute_linearization(model: &ProjectModel) -> LinResult {
    let mut graph: HashMap<BaseRef, Vec<BaseRef>> = HashMap::new();
    for id in model.contract_ids() {
        let c = model.contract(id);
        let bases = c
            .bases
            .iter()
            .map(|b| match model.resolve_contract(&b.name, id.unit) {
                Some(bid) => BaseRef::Known(bid),
                None => BaseRef::Unknown(last_segment(&b.name).to_string()),
            })
            .collect();
        graph.insert(BaseRef::Known(id), bases);
    }
    let solved = linearize_all(&graph, |b| model.base_name(b));
    let mut out = HashMap::new();
    let mut errors = Vec::new();
    for id in model.contract_ids() {
        match &solved[&BaseRef::Known(id)] {
            Ok(l) => {
                out.insert(id, l.clone());
            }
            Err(e) => {
                errors.push((id, e.clone()));
                out.insert(id, vec![BaseRef::Known(id)]);
            }
        }
    }
    (out, errors)
}

pub(crate) fn last_segment(name: &str) -> &str {
    name.rsplit('.').next().unwrap_or(name)
}

fn normalize_path(p: &Path) -> String {
    let mut parts: Vec<String> = Vec::new();
    for c in p.components() {
        match c {
            Component::ParentDir => {
                parts.pop();
            }
            Component::Normal(s) => parts.push(s.to_string_lossy().into_owned()),
            _ => {}
        }
    }
    parts.join("/")
}

fn resolve_import(from: &str, import: &str, known: &HashSet<&str>) -> String {
    if import.starts_with("./") || import.starts_with("../") {
        let dir = Path::new(from).parent().unwrap_or(Path::new(""));
        return normalize_path(&dir.join(import));
    }
    let direct = normalize_path(Path::new(import));
    let candidates = [
        direct.clone(),
        format!("node_modules/{direct}"),
        format!("lib/{direct}"),
    ];
    candidates
        .into_iter()
        .find(|c| known.contains(c.as_str()))
        .unwrap_or(direct)
}

impl ProjectModel {
    /// Build a model from in-memory `(path, source)` pairs without filtering.
    pub fn from_sources<P: AsRef<str>, S: AsRef<str>>(files: &[(P, S)]) -> ProjectModel {
        let mut sorted: Vec<(String, String)> = files
            .iter()
            .map(|(p, s)| (p.as_ref().to_string(), s.as_ref().to_string()))
            .collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let all: Vec<String> = sorted.iter().map(|(p, _)| p.clone()).collect();
        ProjectModel::build(PathBuf::new(), sorted, &all, Vec::new())
    }

    fn build(
        root: PathBuf,
        sources: Vec<(String, String)>,
        all_paths: &[String],
        mut diagnostics: Vec<FileDiagnostic>,
    ) -> ProjectModel {
        let parsed: Vec<(String, String, Result<SourceUnit, String>)> = sources
            .into_par_iter()
            .map(|(path, source)| {
                // file ids are assigned after filtering out failures
                let ast = parse_source_unit(&source, &path, FileId(0)).map_err(|e| e.to_string());
                (path, source, ast)
            })
            .collect();
        let mut units = Vec::new();
        for (path, source, ast) in parsed {
            match ast {
                Ok(_) => {
                    let file = FileId(units.len() as u32);
                    // reparse with the final id so spans carry the right file
                    let ast = parse_source_unit(&source, &path, file)
                        .expect("parsing is deterministic");
                    for d in &ast.diagnostics {
                        diagnostics.push(FileDiagnostic {
                            path: path.clone(),
                            message: format!("{}:{}: {}", d.line, d.column, d.message),
                        });
                    }
                    units.push(LoadedUnit { path, source, ast });
                }
                Err(message) => diagnostics.push(FileDiagnostic { path, message }),
            }
        }

        let known: HashSet<&str> = all_paths.iter().map(String::as_str).collect();
        let imports = units
            .iter()
            .map(|u| {
                let list = u
                    .ast
                    .imports
                    .iter()
                    .map(|i| resolve_import(&u.path, &i.path, &known))
                    .collect();
                (u.path.clone(), list)
            })
            .collect();

        let mut contract_table = BTreeMap::new();
        let mut by_name: HashMap<String, Vec<ContractId>> = HashMap::new();
        for (ui, u) in units.iter().enumerate() {
            for (ci, c) in u.ast.contracts.iter().enumerate() {
                let id = ContractId {
                    unit: ui,
                    index: ci,
                };
                contract_table.insert(format!("{}:{}", u.path, c.name), id);
                by_name.entry(c.name.clone()).or_default().push(id);
            }
        }

        let mut model = ProjectModel {
            root,
            units,
            excluded: Vec::new(),
            diagnostics,
            imports,
            call_graph: CallGraph::default(),
            contract_table,
            by_name,
            linearization: HashMap::new(),
        };
        let (lin, errors) = compute_linearization(&model);
        for (id, e) in errors {
            model.diagnostics.push(FileDiagnostic {
                path: model.units[id.unit].path.clone(),
                message: e.to_string(),
            });
        }
        model.linearization = lin;
        model.call_graph = build_call_graph(&model);
        model
    }

    // ---- contracts ----

    /// All contracts in deterministic (file, declaration) order.
    pub fn contract_ids(&self) -> impl Iterator<Item = ContractId> + '_ {
        self.units.iter().enumerate().flat_map(|(ui, u)| {
            (0..u.ast.contracts.len()).map(move |ci| ContractId {
                unit: ui,
                index: ci,
            })
        })
    }

    pub fn contract(&self, id: ContractId) -> &ContractDefinition {
        &self.units[id.unit].ast.contracts[id.index]
    }

    pub fn unit(&self, id: ContractId) -> &LoadedUnit {
        &self.units[id.unit]
    }

    /// `path:Name`
    pub fn qualified_name(&self, id: ContractId) -> String {
        format!("{}:{}", self.units[id.unit].path, self.contract(id).name)
    }

    /// Qualified name -> contract, e.g. `contracts/Vault.sol:Vault`.
    pub fn contract_table(&self) -> &BTreeMap<String, ContractId> {
        &self.contract_table
    }

    pub fn contracts_named(&self, name: &str) -> &[ContractId] {
        self.by_name.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Resolve a (possibly dotted) contract name as seen from file `unit`:
    /// same file first, then the import closure, then any unique match.
    pub fn resolve_contract(&self, name: &str, unit: usize) -> Option<ContractId> {
        let candidates = self.contracts_named(last_segment(name));
        match candidates {
            [] => None,
            [only] => Some(*only),
            many => {
                if let Some(id) = many.iter().find(|c| c.unit == unit) {
                    return Some(*id);
                }
                let closure = self.import_closure(unit);
                many.iter()
                    .find(|c| closure.contains(&self.units[c.unit].path))
                    .or_else(|| many.first())
                    .copied()
            }
        }
    }

    fn import_closure(&self, unit: usize) -> HashSet<String> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([self.units[unit].path.clone()]);
        while let Some(p) = queue.pop_front() {
            if let Some(next) = self.imports.get(&p) {
                for n in next {
                    if seen.insert(n.clone()) {
                        queue.push_back(n.clone());
                    }
                }
            }
        }
        seen
    }

    /// Linearized bases of `id`, most derived first (starts with `id`).
    pub fn linearization(&self, id: ContractId) -> &[BaseRef] {
        &self.linearization[&id]
    }

    pub fn linearized_names(&self, id: ContractId) -> Vec<String> {
        self.linearization(id)
            .iter()
            .map(|b| self.base_name(b))
            .collect()
    }

    fn base_name(&self, b: &BaseRef) -> String {
        match b {
            BaseRef::Known(id) => self.contract(*id).name.clone(),
            BaseRef::Unknown(n) => n.clone(),
        }
    }

    /// Known contracts of the linearization of `id`, most derived first.
    pub fn known_bases(&self, id: ContractId) -> impl Iterator<Item = ContractId> + '_ {
        self.linearization(id).iter().filter_map(|b| match b {
            BaseRef::Known(c) => Some(*c),
            BaseRef::Unknown(_) => None,
        })
    }

    // ---- callables ----

    pub fn callable(&self, id: CallableId) -> Callable<'_> {
        match id {
            CallableId::Function { contract, index } => {
                Callable::Function(&self.contract(contract).functions[index])
            }
            CallableId::Modifier { contract, index } => {
                Callable::Modifier(&self.contract(contract).modifiers[index])
            }
        }
    }

    pub fn function_ref(&self, id: CallableId) -> FunctionRef {
        let c = self.contract(id.contract());
        let (name, signature, kind, span) = match self.callable(id) {
            Callable::Function(f) => (
                f.display_name().to_string(),
                f.signature(),
                CallableKind::Function,
                f.span,
            ),
            Callable::Modifier(m) => (
                m.name.clone(),
                crate::ast::param_signature(&m.parameters),
                CallableKind::Modifier,
                m.span,
            ),
        };
        FunctionRef {
            file: self.units[id.contract().unit].path.clone(),
            contract: c.name.clone(),
            name,
            signature,
            kind,
            span,
            id,
        }
    }

    /// Every function and modifier in deterministic order.
    pub fn callable_ids(&self) -> Vec<CallableId> {
        let mut out = Vec::new();
        for cid in self.contract_ids() {
            let c = self.contract(cid);
            out.extend((0..c.functions.len()).map(|index| CallableId::Function {
                contract: cid,
                index,
            }));
            out.extend((0..c.modifiers.len()).map(|index| CallableId::Modifier {
                contract: cid,
                index,
            }));
        }
        out
    }

    /// Locate a target function. `signature` may be `(uint256,address)` or
    /// `uint256,address`; it is required only when the name is overloaded.
    pub fn find_function(
        &self,
        contract: &str,
        function: &str,
        signature: Option<&str>,
    ) -> Result<FunctionRef, ProjectError> {
        let target = format!("{contract}.{function}");
        let contracts: Vec<ContractId> = match self.contract_table.get(contract) {
            Some(id) => vec![*id],
            None => self.contracts_named(contract).to_vec(),
        };
        let mut found = Vec::new();
        for cid in contracts {
            for (index, f) in self.contract(cid).functions.iter().enumerate() {
                if f.display_name() == function {
                    found.push(self.function_ref(CallableId::Function {
                        contract: cid,
                        index,
                    }));
                }
            }
        }
        if let Some(sig) = signature {
            let want = canonical_signature(sig);
            found.retain(|f| f.signature == want);
        }
        match found.len() {
            0 => Err(ProjectError::NotFound(match signature {
                Some(s) => format!("{target}{}", canonical_signature(s)),
                None => target,
            })),
            1 => Ok(found.remove(0)),
            _ => Err(ProjectError::AmbiguousTarget {
                target,
                candidates: found.iter().map(|f| f.qualified()).collect(),
            }),
        }
    }

    /// Resolve `name` called with `argc` arguments along the linearization of
    /// `contract`. The most derived definition with a matching arity wins.
    pub fn lookup_function(&self, contract: ContractId, name: &str, argc: usize) -> Option<CallableId> {
        let mut by_name = None;
        for cid in self.known_bases(contract) {
            for (index, f) in self.contract(cid).functions.iter().enumerate() {
                if f.name != name || f.function_kind != crate::ast::FunctionKind::Function {
                    continue;
                }
                let id = CallableId::Function {
                    contract: cid,
                    index,
                };
                if f.parameters.len() == argc {
                    return Some(id);
                }
                by_name.get_or_insert(id);
            }
        }
        by_name
    }

    /// Like [`lookup_function`](Self::lookup_function) but skipping `contract` itself.
    pub fn lookup_super_function(
        &self,
        contract: ContractId,
        name: &str,
        argc: usize,
    ) -> Option<CallableId> {
        self.known_bases(contract)
            .skip(1)
            .find_map(|cid| {
                self.contract(cid)
                    .functions
                    .iter()
                    .position(|f| f.name == name && f.parameters.len() == argc)
                    .map(|index| CallableId::Function {
                        contract: cid,
                        index,
                    })
            })
    }

    pub fn lookup_modifier(&self, contract: ContractId, name: &str) -> Option<CallableId> {
        self.known_bases(contract).find_map(|cid| {
            self.contract(cid)
                .modifiers
                .iter()
                .position(|m| m.name == name)
                .map(|index| CallableId::Modifier {
                    contract: cid,
                    index,
                })
        })
    }

    pub fn lookup_state_var(&self, contract: ContractId, name: &str) -> Option<StateVarId> {
        self.known_bases(contract).find_map(|cid| {
            self.contract(cid)
                .state_variables
                .iter()
                .position(|v| v.name == name)
                .map(|index| StateVarId {
                    contract: cid,
                    index,
                })
        })
    }

    pub fn state_var(&self, id: StateVarId) -> &StateVariable {
        &self.contract(id.contract).state_variables[id.index]
    }

    pub fn lookup_event(&self, contract: ContractId, name: &str) -> Option<(ContractId, &EventDefinition)> {
        self.known_bases(contract)
            .find_map(|cid| {
                self.contract(cid)
                    .events
                    .iter()
                    .find(|e| e.name == name)
                    .map(|e| (cid, e))
            })
            .or_else(|| {
                self.units[contract.unit]
                    .ast
                    .events
                    .iter()
                    .find(|e| e.name == name)
                    .map(|e| (contract, e))
            })
    }

    /// A struct visible from `contract` (own, inherited, file-level, or any
    /// contract's `S.Name` qualified struct).
    pub fn lookup_struct(&self, contract: ContractId, name: &str) -> Option<&StructDefinition> {
        let short = last_segment(name);
        if let Some(s) = self
            .known_bases(contract)
            .find_map(|cid| self.contract(cid).structs.iter().find(|s| s.name == short))
        {
            return Some(s);
        }
        self.units.iter().find_map(|u| {
            u.ast.structs.iter().find(|s| s.name == short).or_else(|| {
                u.ast
                    .contracts
                    .iter()
                    .find_map(|c| c.structs.iter().find(|s| s.name == short))
            })
        })
    }

    /// Whether `name` is a non-contract user-defined type (enum, UDVT, error, event).
    pub fn is_plain_type_name(&self, contract: ContractId, name: &str) -> bool {
        let short = last_segment(name);
        let in_contract = |c: &ContractDefinition| {
            c.enums.iter().any(|e| e.name == short)
                || c.user_types.iter().any(|t| t == short)
                || c.errors.iter().any(|e| e.name == short)
        };
        self.known_bases(contract).any(|cid| in_contract(self.contract(cid)))
            || self.units.iter().any(|u| {
                u.ast.enums.iter().any(|e| e.name == short)
                    || u.ast.user_types.iter().any(|t| t == short)
                    || u.ast.errors.iter().any(|e| e.name == short)
                    || u.ast.contracts.iter().any(in_contract)
            })
    }

    pub fn is_library(&self, id: ContractId) -> bool {
        self.contract(id).contract_kind == ContractKind::Library
    }

    // ---- source ----

    pub fn source(&self, file: FileId) -> &str {
        &self.units[file.0 as usize].source
    }

    /// Verbatim source text of `span`.
    pub fn text(&self, span: Span) -> &str {
        &self.source(span.file)[span.start..span.end]
    }

    pub fn unit_by_path(&self, path: &str) -> Option<&LoadedUnit> {
        self.units.iter().find(|u| u.path == path)
    }
}

/// Normalize a user-supplied signature to the canonical `(t1,t2)` form.
pub fn canonical_signature(sig: &str) -> String {
    let inner = sig.trim().trim_start_matches('(').trim_end_matches(')');
    let types: Vec<String> = inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let mut words = t.split_whitespace().filter(|w| {
                !matches!(*w, "memory" | "storage" | "calldata" | "payable")
            });
            let ty = words.next().unwrap_or("");
            crate::ast::canonical_elementary(ty)
        })
        .collect();
    format!("({})", types.join(","))
}
