// SPDX-License-Identifier: Apache-2.0

//! Prompt assembly: instruction, few-shot context, bundle input and output
//! schema, kept under a token budget.

mod bundled;
mod store;

use serde::Serialize;
use thiserror::Error;

use crate::ast::{tokenize, FileId, TokenKind};
use crate::context::{bundle_to_json, ContextBundle};
use crate::project::VulnCategory;

pub use store::{
    load_example_store, render_instruction, CategoryPrompts, Example, ExampleLabel, ExampleStore,
};

pub const DEFAULT_BUDGET: usize = 4000;

/// Section headers in prompt order. Each appears on its own line as `### Name`.
pub const SECTION_NAMES: [&str; 4] = ["Instruction", "Context", "Input", "Output"];

/// Response schema appended to every prompt.
pub const OUTPUT_FORMAT: &str = "Answer with a single JSON object and nothing else. Use these keys, in double quotes:
- \"is_vulnerable\": true or false
- \"code_snippet\": the statement that makes the target function vulnerable, copied exactly from the input; required when is_vulnerable is true
- \"line\": the line number of that statement counted from the first line of target_function; optional";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("invalid example store:{}", violations.iter().map(|v| format!("\n  - {v}")).collect::<String>())]
    StoreInvalid { violations: Vec<String> },
    #[error("no instruction template for category `{0}`")]
    TemplateMissing(String),
    #[error("prompt needs at least {needed} tokens even after truncation, budget is {budget}")]
    BudgetImpossible { needed: usize, budget: usize },
    #[error("no few-shot examples for `{0}`; pass --allow-zero-shot to run without them")]
    ZeroShotRefused(VulnCategory),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Token estimate: one token per four bytes, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    text.len().div_ceil(4)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PromptSection {
    pub name: String,
    pub text: String,
}

/// One truncation step: a whole field, or one entry of a list field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dropped {
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub item: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssembledPrompt {
    pub sections: Vec<PromptSection>,
    pub text: String,
    pub token_count: usize,
    /// Truncation steps in the order they were applied.
    pub dropped: Vec<Dropped>,
    /// Names of the examples kept in the Context section.
    pub examples: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromptOptions {
    pub budget: usize,
    pub allow_zero_shot: bool,
}

impl Default for PromptOptions {
    fn default() -> Self {
        PromptOptions {
            budget: DEFAULT_BUDGET,
            allow_zero_shot: false,
        }
    }
}

/// Assemble with the given budget, refusing zero-shot prompts.
pub fn assemble_prompt(
    category: VulnCategory,
    bundle: &ContextBundle,
    store: &ExampleStore,
    budget: usize,
) -> Result<AssembledPrompt, PromptError> {
    assemble_prompt_with(
        category,
        bundle,
        store,
        &PromptOptions {
            budget,
            allow_zero_shot: false,
        },
    )
}

pub fn assemble_prompt_with(
    category: VulnCategory,
    bundle: &ContextBundle,
    store: &ExampleStore,
    options: &PromptOptions,
) -> Result<AssembledPrompt, PromptError> {
    let prompts = store
        .get(category)
        .ok_or_else(|| PromptError::TemplateMissing(category.to_string()))?;
    let instruction = prompts
        .instruction
        .as_deref()
        .ok_or_else(|| PromptError::TemplateMissing(category.to_string()))?;
    let mut positives: Vec<&Example> = prompts.positives().collect();
    let mut negatives: Vec<&Example> = prompts.negatives().collect();
    if (positives.is_empty() || negatives.is_empty()) && !options.allow_zero_shot {
        return Err(PromptError::ZeroShotRefused(category));
    }

    let minimal = ContextBundle {
        target_function: bundle.target_function.clone(),
        ..ContextBundle::default()
    };
    let needed = estimate_tokens(&render(instruction, &[], &minimal).1);
    if needed > options.budget {
        return Err(PromptError::BudgetImpossible {
            needed,
            budget: options.budget,
        });
    }

    let referenced = identifiers(&bundle.target_function);
    let mut current = bundle.clone();
    let mut dropped = Vec::new();
    loop {
        let examples: Vec<&Example> = positives.iter().chain(negatives.iter()).copied().collect();
        let (sections, text) = render(instruction, &examples, &current);
        let token_count = estimate_tokens(&text);
        if token_count <= options.budget {
            return Ok(AssembledPrompt {
                sections,
                text,
                token_count,
                dropped,
                examples: examples.iter().map(|e| e.name.clone()).collect(),
            });
        }
        let step = next_reduction(&mut current, &referenced, &mut positives, &mut negatives);
        match step {
            Some(d) => dropped.push(d),
            None => {
                return Err(PromptError::BudgetImpossible {
                    needed: token_count,
                    budget: options.budget,
                })
            }
        }
    }
}

fn whole(field: &str) -> Option<Dropped> {
    Some(Dropped {
        field: field.to_string(),
        item: None,
    })
}

fn entry(field: &str, item: String) -> Option<Dropped> {
    Some(Dropped {
        field: field.to_string(),
        item: Some(item),
    })
}

/// Apply the next truncation step; `None` once nothing is left to drop.
fn next_reduction(
    b: &mut ContextBundle,
    referenced: &[String],
    positives: &mut Vec<&Example>,
    negatives: &mut Vec<&Example>,
) -> Option<Dropped> {
    if !b.events.is_empty() {
        b.events.clear();
        return whole("events");
    }
    if !b.imports.is_empty() {
        b.imports.clear();
        return whole("imports");
    }
    if let Some(last) = b.callstack.pop() {
        return entry("callstack", last.signature);
    }
    if !b.modifiers_codes.is_empty() {
        b.modifiers_codes.clear();
        return whole("modifiers_codes");
    }
    if let Some(i) = b
        .internal_states
        .iter()
        .rposition(|s| !declared_name(s).is_some_and(|n| referenced.contains(&n)))
    {
        return entry("internal_states", b.internal_states.remove(i));
    }
    if let Some(e) = positives.pop() {
        return entry("examples", e.name.clone());
    }
    if let Some(e) = negatives.pop() {
        return entry("examples", e.name.clone());
    }
    if !b.constructor.is_empty() {
        b.constructor.clear();
        return whole("constructor");
    }
    if !b.initializer.is_empty() {
        b.initializer.clear();
        return whole("initializer");
    }
    if let Some(last) = b.internal_states.pop() {
        return entry("internal_states", last);
    }
    for (name, list) in [
        ("external_objects", &mut b.external_objects),
        ("internal_calls", &mut b.internal_calls),
        ("modifiers", &mut b.modifiers),
        ("external_calls", &mut b.external_calls),
    ] {
        if !list.is_empty() {
            list.clear();
            return whole(name);
        }
    }
    None
}

fn identifiers(source: &str) -> Vec<String> {
    tokenize(source, FileId(0))
        .map(|toks| {
            toks.into_iter()
                .filter(|t| t.kind == TokenKind::Identifier)
                .map(|t| t.text)
                .collect()
        })
        .unwrap_or_default()
}

/// Variable name of a state declaration text such as `uint256 public x = 1;`.
fn declared_name(decl: &str) -> Option<String> {
    let toks = tokenize(decl, FileId(0)).ok()?;
    toks.iter()
        .take_while(|t| !t.is("=") && !t.is(";"))
        .filter(|t| t.kind == TokenKind::Identifier)
        .last()
        .map(|t| t.text.clone())
}

fn verdict_line(e: &Example) -> String {
    let mut v = serde_json::Map::new();
    v.insert(
        "is_vulnerable".into(),
        serde_json::Value::Bool(e.label == ExampleLabel::Positive),
    );
    if let Some(s) = &e.code_snippet {
        v.insert("code_snippet".into(), serde_json::Value::String(s.clone()));
    }
    format!("Verdict: {}", serde_json::Value::Object(v))
}

fn render_example(index: usize, e: &Example) -> String {
    let label = match e.label {
        ExampleLabel::Positive => "vulnerable",
        ExampleLabel::Negative => "not vulnerable",
    };
    format!(
        "Example {index} ({label}):\n```solidity\n{}\n```\nAnalysis:\n{}\n{}",
        e.code.trim_end(),
        e.explanation.trim_end(),
        verdict_line(e)
    )
}

fn render(instruction: &str, examples: &[&Example], bundle: &ContextBundle) -> (Vec<PromptSection>, String) {
    let context = if examples.is_empty() {
        "No examples are provided for this category.".to_string()
    } else {
        examples
            .iter()
            .enumerate()
            .map(|(i, e)| render_example(i + 1, e))
            .collect::<Vec<_>>()
            .join("\n\n")
    };
    let bodies = [
        instruction.trim_end().to_string(),
        context,
        format!("<code>\n{}</code>", bundle_to_json(bundle)),
        OUTPUT_FORMAT.to_string(),
    ];
    let sections: Vec<PromptSection> = SECTION_NAMES
        .iter()
        .zip(bodies)
        .map(|(name, text)| PromptSection {
            name: name.to_string(),
            text,
        })
        .collect();
    let text = sections
        .iter()
        .map(|s| format!("### {}\n{}\n", s.name, s.text))
        .collect::<Vec<_>>()
        .join("\n");
    (sections, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle() -> ContextBundle {
        ContextBundle {
            target_function: "function withdraw() external { msg.sender.call(\"\"); x = 1; }".into(),
            internal_states: vec!["uint256 x;".into(), "uint256 unrelated = 3;".into()],
            ..ContextBundle::default()
        }
    }

    #[test]
    fn token_estimates() {
        assert_eq!(estimate_tokens(""), 0);
        assert_eq!(estimate_tokens("abcd"), 1);
        assert_eq!(estimate_tokens("abcde"), 2);
        assert_eq!(estimate_tokens(&"a".repeat(16_004)), 4001);
    }

    #[test]
    fn four_sections_in_order() {
        let p = assemble_prompt(VulnCategory::Reentrancy, &bundle(), &ExampleStore::bundled(), 4000).unwrap();
        let headers: Vec<&str> = p.text.lines().filter(|l| l.starts_with("### ")).collect();
        assert_eq!(headers, ["### Instruction", "### Context", "### Input", "### Output"]);
        assert!(p.token_count <= 4000);
        assert_eq!(p.examples.len(), 4);
        assert!(p.examples[0].starts_with("pos_") && p.examples[3].starts_with("neg_"));
    }

    #[test]
    fn tiny_budget_is_impossible() {
        assert!(matches!(
            assemble_prompt(VulnCategory::Reentrancy, &bundle(), &ExampleStore::bundled(), 50),
            Err(PromptError::BudgetImpossible { .. })
        ));
    }

    #[test]
    fn unreferenced_state_goes_first() {
        assert_eq!(declared_name("uint256 public constant FEE = 3;").as_deref(), Some("FEE"));
        assert_eq!(declared_name("mapping(address => uint) balances;").as_deref(), Some("balances"));
        let mut b = bundle();
        let mut p = Vec::new();
        let mut n = Vec::new();
        let referenced = identifiers(&b.target_function);
        let d = next_reduction(&mut b, &referenced, &mut p, &mut n).unwrap();
        assert_eq!(d.item.as_deref(), Some("uint256 unrelated = 3;"));
    }

    #[test]
    fn zero_shot_needs_opt_in() {
        let mut store = ExampleStore::bundled();
        store
            .categories
            .get_mut(&VulnCategory::Reentrancy)
            .unwrap()
            .examples
            .clear();
        assert!(matches!(
            assemble_prompt(VulnCategory::Reentrancy, &bundle(), &store, 4000),
            Err(PromptError::ZeroShotRefused(_))
        ));
        let opts = PromptOptions {
            budget: 4000,
            allow_zero_shot: true,
        };
        assert!(assemble_prompt_with(VulnCategory::Reentrancy, &bundle(), &store, &opts).is_ok());
    }
}
