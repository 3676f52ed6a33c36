// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use scvd::ast::visit::{own_expressions, walk_block, walk_expression};
use scvd::ast::{
    parse_expression, parse_source_unit, parse_statement, slice_source, tokenize, FileId,
    SourceUnit, Span,
};
use serde_json::Value;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Sorted `.sol` files directly under `dir`.
pub fn sol_files(dir: &Path) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "sol"))
        .collect();
    out.sort();
    out
}

/// Token texts plus the whitespace between them rebuild the source.
pub fn check_lossless(source: &str) -> Result<(), String> {
    let tokens = tokenize(source, FileId(0)).map_err(|e| e.to_string())?;
    let mut rebuilt = String::with_capacity(source.len());
    let mut at = 0;
    for t in &tokens {
        let gap = &source[at..t.span.start];
        if !gap.chars().all(char::is_whitespace) {
            return Err(format!("non-whitespace gap {gap:?} at byte {at}"));
        }
        if source[t.span.start..t.span.end] != t.text {
            return Err(format!("token text differs from source at byte {}", t.span.start));
        }
        rebuilt.push_str(gap);
        rebuilt.push_str(&t.text);
        at = t.span.end;
    }
    if !source[at..].chars().all(char::is_whitespace) {
        return Err("trailing bytes not covered by tokens".into());
    }
    rebuilt.push_str(&source[at..]);
    (rebuilt == source).then_some(()).ok_or_else(|| "rebuilt text differs".into())
}

fn is_span(map: &serde_json::Map<String, Value>) -> bool {
    map.len() == 5
        && ["file", "start", "end", "start_line", "end_line"]
            .iter()
            .all(|k| map.contains_key(*k))
}

/// Shift every span in a serialized node as if its text started at byte 0, line 1.
pub fn rebase(value: &mut Value, offset: u64, lines: u64) {
    match value {
        Value::Object(map) if is_span(map) => {
            for k in ["start", "end"] {
                map[k] = Value::from(map[k].as_u64().unwrap() - offset);
            }
            for k in ["start_line", "end_line"] {
                map[k] = Value::from(map[k].as_u64().unwrap() - lines);
            }
        }
        Value::Object(map) => map.values_mut().for_each(|v| rebase(v, offset, lines)),
        Value::Array(items) => items.iter_mut().for_each(|v| rebase(v, offset, lines)),
        _ => {}
    }
}

fn same_after_rebase<T: serde::Serialize>(original: &T, span: Span, reparsed: &T) -> bool {
    let mut a = serde_json::to_value(original).unwrap();
    rebase(&mut a, span.start as u64, span.start_line as u64 - 1);
    a == serde_json::to_value(reparsed).unwrap()
}

/// Reparse every statement and expression of every body from its own
/// source slice. Returns the number of nodes checked.
pub fn check_round_trip(source: &str, unit: &SourceUnit) -> Result<usize, String> {
    let file = FileId(0);
    let mut checked = 0;
    let mut failure = None;
    let bodies = unit.contracts.iter().flat_map(|c| {
        c.functions
            .iter()
            .filter_map(|f| f.body.as_ref())
            .chain(c.modifiers.iter().filter_map(|m| m.body.as_ref()))
    });
    for body in bodies {
        walk_block(body, &mut |stmt| {
            if failure.is_some() {
                return;
            }
            let span = stmt.span();
            let text = slice_source(source, &span).unwrap();
            match parse_statement(text, file) {
                Ok(again) if same_after_rebase(stmt, span, &again) => checked += 1,
                Ok(_) => failure = Some(format!("statement differs after reparse: {text}")),
                Err(e) => failure = Some(format!("statement {text:?} does not reparse: {e}")),
            }
            for root in own_expressions(stmt) {
                walk_expression(root, &mut |expr| {
                    if failure.is_some() {
                        return;
                    }
                    let span = expr.span();
                    let text = slice_source(source, &span).unwrap();
                    match parse_expression(text, file) {
                        Ok(again) if same_after_rebase(expr, span, &again) => checked += 1,
                        Ok(_) => failure = Some(format!("expression differs after reparse: {text}")),
                        Err(e) => failure = Some(format!("expression {text:?} does not reparse: {e}")),
                    }
                });
            }
        });
    }
    failure.map_or(Ok(checked), Err)
}

/// Parse, then run the lossless and round-trip checks.
pub fn check_fixture(path: &Path) -> Result<usize, String> {
    let source = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let name = path.file_name().unwrap().to_string_lossy();
    let unit = parse_source_unit(&source, &name, FileId(0)).map_err(|e| e.to_string())?;
    if let Some(d) = unit.diagnostics.first() {
        if !name.contains("free_functions") {
            return Err(format!("diagnostic: {}", d.message));
        }
    }
    check_lossless(&source)?;
    check_round_trip(&source, &unit)
}

#[derive(serde::Deserialize)]
pub struct GoldenCase {
    pub name: String,
    pub project: String,
    pub contract: String,
    pub function: String,
    pub category: scvd::project::VulnCategory,
    pub depth: usize,
}

pub fn golden_cases() -> Vec<GoldenCase> {
    let text = std::fs::read_to_string(fixtures().join("golden/cases.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Extract the bundle for a golden case and render it canonically.
pub fn golden_bundle(case: &GoldenCase) -> String {
    let root = fixtures().join("golden").join(&case.project);
    let model = scvd::project::load_project(&root, &Default::default()).unwrap();
    let target = model.find_function(&case.contract, &case.function, None).unwrap();
    let bundle = scvd::context::extract_context(&model, &target, case.category, case.depth).unwrap();
    scvd::context::bundle_to_json(&bundle)
}

pub fn golden_path(case: &GoldenCase) -> PathBuf {
    fixtures().join("golden").join(format!("{}.json", case.name))
}

#[derive(serde::Deserialize)]
pub struct TransferSwap {
    pub from: String,
    pub to: String,
}

#[derive(serde::Deserialize)]
pub struct ReentrancyCase {
    pub id: String,
    pub file: String,
    pub contract: String,
    pub function: String,
    pub rule: String,
    pub vulnerable: bool,
    pub snippet: Option<String>,
    pub transfer: Option<TransferSwap>,
}

pub fn reentrancy_cases() -> Vec<(ReentrancyCase, String)> {
    let dir = fixtures().join("reentrancy");
    let text = std::fs::read_to_string(dir.join("cases.json")).unwrap();
    let cases: Vec<ReentrancyCase> = serde_json::from_str(&text).unwrap();
    cases
        .into_iter()
        .map(|c| {
            let src = std::fs::read_to_string(dir.join(&c.file)).unwrap();
            (c, src)
        })
        .collect()
}

pub fn rules_verdict(case: &ReentrancyCase, source: &str) -> scvd::backend::Verdict {
    let model = scvd::project::ProjectModel::from_sources(&[(case.file.as_str(), source)]);
    let target = model.find_function(&case.contract, &case.function, None).unwrap();
    scvd::backend::rule_detect(scvd::project::VulnCategory::Reentrancy, &model, &target).unwrap()
}

/// Add a `nonReentrant` invocation to the target function header.
pub fn with_guard(case: &ReentrancyCase, source: &str) -> String {
    let header = format!("function {}(", case.function);
    source
        .lines()
        .map(|l| {
            if l.contains(&header) && l.trim_end().ends_with('{') {
                let cut = l.rfind('{').unwrap();
                format!("{}nonReentrant {}", &l[..cut], &l[cut..])
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Drop every line between the `// CALL` and `// END` markers.
pub fn without_tail(source: &str) -> String {
    let mut out = Vec::new();
    let mut skipping = false;
    for l in source.lines() {
        if l.contains("// END") {
            skipping = false;
        }
        if !skipping {
            out.push(l);
        }
        if l.contains("// CALL") {
            skipping = true;
        }
    }
    out.join("\n")
}

pub fn with_transfer(case: &ReentrancyCase, source: &str) -> Option<String> {
    let swap = case.transfer.as_ref()?;
    assert!(source.contains(&swap.from), "{}", case.id);
    Some(source.replace(&swap.from, &swap.to))
}

/// Hand label agreement plus the three flip mutations on vulnerable cases.
pub fn check_reentrancy_case(case: &ReentrancyCase, source: &str) -> Result<(), String> {
    let v = rules_verdict(case, source);
    if v.is_vulnerable != case.vulnerable {
        return Err(format!("{} ({}): got {}", case.id, case.rule, v.is_vulnerable));
    }
    if let Some(snippet) = &case.snippet {
        if v.code_snippet.as_deref() != Some(snippet.as_str()) {
            return Err(format!("{}: snippet {:?}", case.id, v.code_snippet));
        }
    }
    if !case.vulnerable {
        return Ok(());
    }
    let mut mutants = vec![
        ("nonReentrant", with_guard(case, source)),
        ("tail removed", without_tail(source)),
    ];
    mutants.extend(with_transfer(case, source).map(|s| ("transfer", s)));
    for (what, mutant) in mutants {
        if mutant == source {
            return Err(format!("{}: {what} mutation changed nothing", case.id));
        }
        if rules_verdict(case, &mutant).is_vulnerable {
            return Err(format!("{}: still vulnerable after {what}", case.id));
        }
    }
    Ok(())
}

/// Minimal HTTP endpoint answering scripted `(status, body)` pairs in
/// order and recording each request body.
pub struct StubServer {
    pub base: String,
    pub requests: std::sync::Arc<std::sync::Mutex<Vec<String>>>,
    handle: Option<std::thread::JoinHandle<()>>,
}

impl StubServer {
    pub fn start(script: Vec<(u16, String)>) -> Self {
        use std::io::{BufRead, BufReader, Read, Write};
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let base = format!("http://{}/v1", listener.local_addr().unwrap());
        let requests = std::sync::Arc::new(std::sync::Mutex::new(Vec::new()));
        let seen = requests.clone();
        let handle = std::thread::spawn(move || {
            for (status, body) in script {
                let (stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream);
                let mut length = 0usize;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        length = v.trim().parse().unwrap();
                    }
                }
                let mut buf = vec![0; length];
                reader.read_exact(&mut buf).unwrap();
                seen.lock().unwrap().push(String::from_utf8(buf).unwrap());
                let mut stream = reader.into_inner();
                write!(
                    stream,
                    "HTTP/1.1 {status} Stub\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                )
                .unwrap();
                stream.flush().unwrap();
            }
        });
        StubServer {
            base,
            requests,
            handle: Some(handle),
        }
    }

    pub fn join(mut self) -> Vec<String> {
        self.handle.take().unwrap().join().unwrap();
        self.requests.lock().unwrap().clone()
    }
}

pub fn completion(content: &str) -> String {
    serde_json::json!({
        "id": "stub",
        "object": "chat.completion",
        "choices": [{"index": 0, "message": {"role": "assistant", "content": content}, "finish_reason": "stop"}]
    })
    .to_string()
}

pub fn llm_config(base: &str) -> scvd::backend::BackendConfig {
    scvd::backend::BackendConfig {
        endpoint: base.to_string(),
        api_key: Some("test-key".into()),
        retry_base_ms: 20,
        max_retries: 3,
        timeout_secs: 5,
        ..scvd::backend::BackendConfig::new(scvd::backend::BackendKind::Llm)
    }
}

/// Every instance of a manifest as one eval set, in manifest order.
pub fn whole_set(manifest: &scvd::eval::DatasetManifest) -> scvd::eval::EvalSet {
    use scvd::eval::Label;
    let positives = manifest.instances.iter().filter(|i| i.label == Label::Positive).count();
    scvd::eval::EvalSet {
        category: scvd::project::VulnCategory::Reentrancy,
        seed: 0,
        neg_ratio: 1.0,
        base_dir: manifest.base_dir.clone(),
        instances: manifest.instances.clone(),
        positives,
        negatives: manifest.instances.len() - positives,
        warnings: Vec::new(),
    }
}

pub fn synthetic_manifest() -> scvd::eval::DatasetManifest {
    scvd::eval::load_manifest(&fixtures().join("synthetic/manifest.jsonl")).unwrap()
}

/// Count the matrix from scratch without going through `ConfusionMatrix::record`.
pub fn recount(records: &[scvd::eval::InstanceRecord]) -> (u64, u64, u64, u64) {
    let (mut tp, mut fn_, mut tn, mut fp) = (0, 0, 0, 0);
    for r in records {
        let positive = matches!(r.label, scvd::eval::Label::Positive);
        match (positive, r.verdict.is_vulnerable) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, false) => tn += 1,
            (false, true) => fp += 1,
        }
    }
    (tp, fn_, tn, fp)
}

/// Synthetic pool of `pos` positives and `neg` negatives for one category.
pub fn pool(pos: usize, neg: usize) -> scvd::eval::DatasetManifest {
    use scvd::eval::{Instance, Label};
    let make = |i: usize, label| Instance {
        id: format!("{}{i:04}", if label == Label::Positive { "p" } else { "n" }),
        project: "p".into(),
        contract: "C".into(),
        function: "f".into(),
        signature: None,
        category: scvd::project::VulnCategory::Reentrancy,
        label,
        source: None,
    };
    scvd::eval::DatasetManifest {
        base_dir: ".".into(),
        instances: (0..pos)
            .map(|i| make(i, Label::Positive))
            .chain((0..neg).map(|i| make(i, Label::Negative)))
            .collect(),
    }
}

/// Per-category sampling and rule-backend runs over the synthetic
/// manifest for one seed. Returns `(set size, run)` pairs.
pub fn synthetic_runs(seed: u64) -> Vec<(usize, scvd::eval::EvalRun)> {
    use rand::{Rng, SeedableRng};
    let manifest = synthetic_manifest();
    let config = scvd::eval::PipelineConfig::new(Default::default());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut categories: Vec<_> = manifest.instances.iter().map(|i| i.category).collect();
    categories.sort();
    categories.dedup();
    categories
        .into_iter()
        .map(|c| {
            let ratio = rng.random_range(1.0..=2.0);
            let set = scvd::eval::sample_instances(&manifest, c, seed, ratio, None).unwrap();
            (set.instances.len(), scvd::eval::run_eval(&set, &config))
        })
        .collect()
}

pub mod gen {
    use proptest::collection::vec;
    use proptest::prelude::*;
    use scvd::context::{CallstackEntry, ContextBundle};
    use scvd::prompt::ExampleStore;

    const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_ ;(){}=\n\"\\.";

    /// Random text up to `max` bytes; the length and a seed are drawn, the
    /// characters are filled in from the seed.
    fn text(max: usize) -> impl Strategy<Value = String> {
        (0..=max, any::<u64>()).prop_map(|(len, seed)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..len)
                .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())] as char)
                .collect()
        })
    }

    fn list(items: usize, max: usize) -> impl Strategy<Value = Vec<String>> {
        vec(text(max), 0..items)
    }

    pub fn bundle() -> impl Strategy<Value = ContextBundle> {
        (
            (list(4, 60), list(30, 120), text(16_000)),
            vec((text(40), text(2_000)), 0..12),
            (list(4, 40), list(4, 800), text(1_500), text(1_500)),
            (list(8, 80), list(8, 120), list(6, 30), list(10, 200)),
        )
            .prop_map(|((imports, states, target), stack, (mods, mod_codes, ctor, init), (ic, ec, eo, ev))| {
                ContextBundle {
                    imports,
                    internal_states: states,
                    target_function: target,
                    callstack: stack
                        .into_iter()
                        .map(|(signature, source)| CallstackEntry { signature, source })
                        .collect(),
                    modifiers: mods,
                    modifiers_codes: mod_codes,
                    constructor: ctor,
                    initializer: init,
                    internal_calls: ic,
                    external_calls: ec,
                    external_objects: eo,
                    events: ev,
                }
            })
    }

    /// A single-category store (reentrancy) with random example sizes.
    pub fn store() -> impl Strategy<Value = ExampleStore> {
        (text(3_000), vec(text(3_000), 1..4), vec(text(3_000), 1..4)).prop_map(|(instr, pos, neg)| {
            let mut files = vec![("reentrancy/instruction.md".to_string(), format!("Audit this. {instr}"))];
            for (label, codes) in [("positive", pos), ("negative", neg)] {
                for (i, code) in codes.into_iter().enumerate() {
                    let body = serde_json::json!({
                        "label": label,
                        "code": format!("contract X {{ {code} }}"),
                        "explanation": "Step 1: look. Step 2: decide.",
                        "source": "generated",
                    });
                    files.push((format!("reentrancy/examples/{label}_{i}.json"), body.to_string()));
                }
            }
            ExampleStore::from_files(files).unwrap()
        })
    }
}

/// Budget invariant for one assembly: within budget with the target intact,
/// or a `BudgetImpossible` refusal.
pub fn check_budget(
    bundle: &scvd::context::ContextBundle,
    store: &scvd::prompt::ExampleStore,
    budget: usize,
) -> Result<bool, String> {
    use scvd::prompt::{assemble_prompt, estimate_tokens, PromptError};
    match assemble_prompt(scvd::project::VulnCategory::Reentrancy, bundle, store, budget) {
        Ok(p) => {
            if p.token_count > budget || estimate_tokens(&p.text) != p.token_count {
                return Err(format!("{} tokens over budget {budget}", p.token_count));
            }
            let input = &p.sections[2].text;
            let json = input
                .strip_prefix("<code>\n")
                .and_then(|s| s.strip_suffix("</code>"))
                .ok_or("input section is not wrapped in <code>")?;
            let kept = scvd::context::bundle_from_json(json).map_err(|e| e.to_string())?;
            if kept.target_function != bundle.target_function {
                return Err("target_function was altered".into());
            }
            Ok(true)
        }
        Err(PromptError::BudgetImpossible { needed, .. }) if needed > budget => Ok(false),
        Err(e) => Err(format!("unexpected error: {e}")),
    }
}
