// SPDX-License-Identifier: Apache-2.0

//! Per-category instructions and few-shot examples.
//!
//! Layout: `<category>/instruction.md` and `<category>/examples/<name>.json`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::{PromptError, SECTION_NAMES};
use crate::project::VulnCategory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleLabel {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    /// File stem, e.g. `pos_call_then_write`.
    #[serde(skip)]
    pub name: String,
    pub label: ExampleLabel,
    pub code: String,
    /// Step-by-step reasoning shown after the code.
    pub explanation: String,
    pub source: String,
    /// Statement quoted in the verdict line of positive examples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_snippet: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryPrompts {
    pub instruction: Option<String>,
    /// Sorted by file name.
    pub examples: Vec<Example>,
}

impl CategoryPrompts {
    pub fn positives(&self) -> impl Iterator<Item = &Example> {
        self.examples
            .iter()
            .filter(|e| e.label == ExampleLabel::Positive)
    }

    pub fn negatives(&self) -> impl Iterator<Item = &Example> {
        self.examples
            .iter()
            .filter(|e| e.label == ExampleLabel::Negative)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExampleStore {
    pub categories: BTreeMap<VulnCategory, CategoryPrompts>,
}

/// Raw example file; the label stays a string so bad values can be reported.
#[derive(Deserialize)]
struct RawExample {
    label: String,
    #[serde(default)]
    code: String,
    #[serde(default)]
    explanation: String,
    #[serde(default)]
    source: String,
    #[serde(default)]
    code_snippet: Option<String>,
}

fn has_section_delimiter(text: &str) -> bool {
    text.lines()
        .any(|l| SECTION_NAMES.iter().any(|s| l.trim_end() == format!("### {s}")))
}

impl ExampleStore {
    /// The store shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_files(super::bundled::FILES.iter().map(|(p, t)| (p.to_string(), t.to_string())))
            .expect("bundled prompt store is valid")
    }

    pub fn get(&self, category: VulnCategory) -> Option<&CategoryPrompts> {
        self.categories.get(&category)
    }

    /// Build a store from `(relative path, contents)` pairs, collecting every
    /// violation instead of stopping at the first.
    pub fn from_files(files: impl IntoIterator<Item = (String, String)>) -> Result<Self, PromptError> {
        let mut files: Vec<(String, String)> = files.into_iter().collect();
        files.sort();
        let mut store = ExampleStore::default();
        let mut violations = Vec::new();
        for (path, text) in files {
            let parts: Vec<&str> = path.split('/').collect();
            let Ok(category) = parts[0].parse::<VulnCategory>() else {
                violations.push(format!("{path}: unknown category `{}`", parts[0]));
                continue;
            };
            match parts.as_slice() {
                [_, "instruction.md"] => {
                    if text.trim().is_empty() {
                        violations.push(format!("{path}: instruction is empty"));
                    } else if has_section_delimiter(&text) {
                        violations.push(format!("{path}: contains a prompt section delimiter line"));
                    } else {
                        store.categories.entry(category).or_default().instruction = Some(text);
                    }
                }
                [_, "examples", file] if file.ends_with(".json") => {
                    match parse_example(file.trim_end_matches(".json"), &text) {
                        Ok(e) => store.categories.entry(category).or_default().examples.push(e),
                        Err(reasons) => {
                            violations.extend(reasons.into_iter().map(|r| format!("{path}: {r}")))
                        }
                    }
                }
                _ => violations.push(format!("{path}: unexpected file in prompt store")),
            }
        }
        if store.categories.is_empty() && violations.is_empty() {
            violations.push("no categories found".to_string());
        }
        for (category, prompts) in &store.categories {
            if prompts.examples.is_empty() {
                continue;
            }
            if prompts.positives().next().is_none() {
                violations.push(format!("{category}: no positive example"));
            }
            if prompts.negatives().next().is_none() {
                violations.push(format!("{category}: no negative example"));
            }
        }
        if violations.is_empty() {
            Ok(store)
        } else {
            Err(PromptError::StoreInvalid { violations })
        }
    }
}

fn parse_example(name: &str, text: &str) -> Result<Example, Vec<String>> {
    let raw: RawExample = serde_json::from_str(text).map_err(|e| vec![format!("malformed JSON: {e}")])?;
    let mut reasons = Vec::new();
    let label = match raw.label.as_str() {
        "positive" => Some(ExampleLabel::Positive),
        "negative" => Some(ExampleLabel::Negative),
        other => {
            reasons.push(format!("unknown label `{other}`"));
            None
        }
    };
    if raw.code.trim().is_empty() {
        reasons.push("missing code".to_string());
    }
    if raw.explanation.trim().is_empty() {
        reasons.push("missing explanation".to_string());
    }
    if has_section_delimiter(&raw.code) || has_section_delimiter(&raw.explanation) {
        reasons.push("contains a prompt section delimiter line".to_string());
    }
    match label {
        Some(label) if reasons.is_empty() => Ok(Example {
            name: name.to_string(),
            label,
            code: raw.code,
            explanation: raw.explanation,
            source: raw.source,
            code_snippet: raw.code_snippet,
        }),
        _ => Err(reasons),
    }
}

/// Load a store laid out on disk.
pub fn load_example_store(dir: &Path) -> Result<ExampleStore, PromptError> {
    if !dir.is_dir() {
        return Err(PromptError::Io {
            path: dir.display().to_string(),
            message: "not a directory".into(),
        });
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| PromptError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(dir)
            .expect("under store root")
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        let text = std::fs::read_to_string(entry.path()).map_err(|e| PromptError::Io {
            path: entry.path().display().to_string(),
            message: e.to_string(),
        })?;
        files.push((rel, text));
    }
    ExampleStore::from_files(files)
}

/// The category's instruction text exactly as stored.
pub fn render_instruction(store: &ExampleStore, category: &str) -> Result<String, PromptError> {
    category
        .parse::<VulnCategory>()
        .ok()
        .and_then(|c| store.get(c))
        .and_then(|p| p.instruction.clone())
        .ok_or_else(|| PromptError::TemplateMissing(category.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_store_covers_every_category() {
        let store = ExampleStore::bundled();
        for c in VulnCategory::ALL {
            let p = store.get(c).unwrap();
            assert!(p.instruction.is_some(), "{c}");
            assert!(p.positives().count() >= 1, "{c}");
            assert!(p.negatives().count() >= 1, "{c}");
        }
        let r = store.get(VulnCategory::Reentrancy).unwrap();
        assert_eq!((r.positives().count(), r.negatives().count()), (2, 2));
    }

    #[test]
    fn reentrancy_instruction_text() {
        let text = render_instruction(&ExampleStore::bundled(), "reentrancy").unwrap();
        assert!(text.starts_with("Act as a Smart Contract Security auditor"));
        assert!(text.contains("transfer() and send() are safe"));
        assert!(text.contains("**A target function using a nonReentrant modifier is not vulnerable to reentrancy attacks.**"));
        assert!(matches!(
            render_instruction(&ExampleStore::bundled(), "timestamp"),
            Err(PromptError::TemplateMissing(_))
        ));
    }

    #[test]
    fn every_violation_is_reported() {
        let files = vec![
            (
                "reentrancy/examples/a.json".to_string(),
                r#"{"label":"positive","code":"x","explanation":"","source":""}"#.to_string(),
            ),
            (
                "reentrancy/examples/b.json".to_string(),
                r#"{"label":"maybe","code":"x","explanation":"y","source":""}"#.to_string(),
            ),
            ("oracle/instruction.md".to_string(), "text".to_string()),
        ];
        let Err(PromptError::StoreInvalid { violations }) = ExampleStore::from_files(files) else {
            panic!("expected StoreInvalid");
        };
        assert!(violations.iter().any(|v| v.contains("a.json") && v.contains("explanation")));
        assert!(violations.iter().any(|v| v.contains("b.json") && v.contains("label")));
        assert!(violations.iter().any(|v| v.contains("unknown category")));
    }

    #[test]
    fn empty_store_is_invalid() {
        assert!(matches!(
            ExampleStore::from_files(Vec::new()),
            Err(PromptError::StoreInvalid { .. })
        ));
    }
}
