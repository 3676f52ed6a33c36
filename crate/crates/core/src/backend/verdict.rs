// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::BackendError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub is_vulnerable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_snippet: Option<String>,
    /// Line of the snippet, counted from the first line of the target function.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    pub backend: String,
    /// Model output the verdict was parsed from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_response: Option<String>,
}

impl Verdict {
    pub fn safe(backend: &str) -> Self {
        Verdict {
            is_vulnerable: false,
            code_snippet: None,
            line: None,
            backend: backend.to_string(),
            raw_response: None,
        }
    }

    pub fn vulnerable(backend: &str, snippet: impl Into<String>, line: Option<u32>) -> Self {
        Verdict {
            is_vulnerable: true,
            code_snippet: Some(snippet.into()),
            line,
            backend: backend.to_string(),
            raw_response: None,
        }
    }
}

fn as_bool(v: &Value) -> Option<bool> {
    match v {
        Value::Bool(b) => Some(*b),
        Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        },
        _ => None,
    }
}

fn as_line(v: &Value) -> Option<u32> {
    match v {
        Value::Number(n) => n.as_u64().and_then(|n| u32::try_from(n).ok()),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

/// Pull the first JSON object carrying an `is_vulnerable` key out of free
/// text, tolerating code fences and prose around it.
pub fn parse_verdict(raw: &str) -> Result<Verdict, BackendError> {
    for (start, _) in raw.match_indices('{') {
        let mut stream = serde_json::Deserializer::from_str(&raw[start..]).into_iter::<Value>();
        let Some(Ok(Value::Object(obj))) = stream.next() else {
            continue;
        };
        let Some(is_vulnerable) = obj.get("is_vulnerable").and_then(as_bool) else {
            continue;
        };
        let code_snippet = obj
            .get("code_snippet")
            .and_then(Value::as_str)
            .map(str::to_string);
        return Ok(Verdict {
            is_vulnerable,
            code_snippet,
            line: obj.get("line").and_then(as_line),
            backend: obj
                .get("backend")
                .and_then(Value::as_str)
                .unwrap_or("llm")
                .to_string(),
            raw_response: obj
                .get("raw_response")
                .and_then(Value::as_str)
                .map(str::to_string),
        });
    }
    Err(BackendError::UnparseableResponse(raw.chars().take(200).collect()))
}
