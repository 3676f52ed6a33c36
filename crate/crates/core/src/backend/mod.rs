// SPDX-License-Identifier: Apache-2.0

//! Detection backends: a chat-completion client and a deterministic rule
//! engine behind one trait.

mod llm;
mod rules;
mod verdict;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::project::{FunctionRef, ProjectModel, VulnCategory};
use crate::prompt::AssembledPrompt;

pub use llm::{chat_request_body, llm_request, LlmBackend, LLM_BACKEND};
pub use rules::{rule_detect, rule_detect_reentrancy, RuleBackend, RULES_BACKEND, RULE_CATEGORIES};
pub use verdict::{parse_verdict, Verdict};

pub const API_KEY_VAR: &str = "SCVD_API_KEY";
pub const API_BASE_VAR: &str = "SCVD_API_BASE";
pub const MODEL_VAR: &str = "SCVD_MODEL";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("backend unavailable after {attempts} attempt(s): {message}")]
    BackendUnavailable { attempts: u32, message: String },
    #[error("rules backend does not support category `{0}`")]
    UnsupportedCategory(VulnCategory),
    #[error("response has no JSON object with an `is_vulnerable` key: {0}")]
    UnparseableResponse(String),
    #[error("authentication failed: {0}")]
    AuthError(String),
    #[error("invalid backend config: {0}")]
    Config(String),
    #[error("target `{0}` does not belong to this project")]
    TargetMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Llm,
    Rules,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Llm => "llm",
            BackendKind::Rules => "rules",
        })
    }
}

impl FromStr for BackendKind {
    type Err = BackendError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "llm" => Ok(BackendKind::Llm),
            "rules" => Ok(BackendKind::Rules),
            other => Err(BackendError::Config(format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    /// Base URL; requests go to `{endpoint}/chat/completions`.
    pub endpoint: String,
    pub model: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub temperature: f64,
    /// First backoff delay; doubles on every retry.
    pub retry_base_ms: u64,
    /// Requests allowed in flight at once.
    pub max_concurrency: usize,
    /// Only ever read from the environment.
    #[serde(skip)]
    pub api_key: Option<String>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::Rules,
            endpoint: "https://api.openai.com/v1".into(),
            model: "gpt-4".into(),
            timeout_secs: 60,
            max_retries: 3,
            temperature: 0.0,
            retry_base_ms: 1000,
            max_concurrency: 4,
            api_key: None,
        }
    }
}

impl BackendConfig {
    pub fn new(kind: BackendKind) -> Self {
        BackendConfig {
            kind,
            ..BackendConfig::default()
        }
    }

    /// Parse a TOML table of config keys. `api_key` is rejected.
    pub fn from_toml_str(text: &str) -> Result<Self, BackendError> {
        toml::from_str(text).map_err(|e| BackendError::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, BackendError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Overlay `SCVD_API_KEY`, `SCVD_API_BASE` and `SCVD_MODEL`.
    pub fn with_env(mut self) -> Self {
        self.api_key = std::env::var(API_KEY_VAR).ok().filter(|k| !k.is_empty());
        if let Ok(base) = std::env::var(API_BASE_VAR) {
            if !base.is_empty() {
                self.endpoint = base;
            }
        }
        if let Ok(model) = std::env::var(MODEL_VAR) {
            if !model.is_empty() {
                self.model = model;
            }
        }
        self
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.timeout_secs == 0 {
            return Err(BackendError::Config("timeout_secs must be positive".into()));
        }
        if self.max_concurrency == 0 {
            return Err(BackendError::Config("max_concurrency must be positive".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(BackendError::Config("temperature must be in [0, 2]".into()));
        }
        if self.kind == BackendKind::Llm && self.model.trim().is_empty() {
            return Err(BackendError::Config("model name is empty".into()));
        }
        if self.kind == BackendKind::Llm
            && !(self.endpoint.starts_with("http://") || self.endpoint.starts_with("https://"))
        {
            return Err(BackendError::Config(format!(
                "endpoint `{}` is not an http(s) URL",
                self.endpoint
            )));
        }
        Ok(())
    }
}

pub trait Backend: Send + Sync {
    fn id(&self) -> &'static str;

    fn detect(
        &self,
        category: VulnCategory,
        prompt: &AssembledPrompt,
        model: &ProjectModel,
        target: &FunctionRef,
    ) -> Result<Verdict, BackendError>;
}

pub fn make_backend(config: &BackendConfig) -> Result<Box<dyn Backend>, BackendError> {
    config.validate()?;
    Ok(match config.kind {
        BackendKind::Rules => Box::new(RuleBackend),
        BackendKind::Llm => Box::new(LlmBackend::new(config.clone())),
    })
}

/// One-shot convenience over [`make_backend`].
pub fn detect(
    config: &BackendConfig,
    category: VulnCategory,
    prompt: &AssembledPrompt,
    model: &ProjectModel,
    target: &FunctionRef,
) -> Result<Verdict, BackendError> {
    make_backend(config)?.detect(category, prompt, model, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(BackendConfig::default().validate().is_ok());
        let bad = BackendConfig {
            timeout_secs: 0,
            ..BackendConfig::default()
        };
        assert!(matches!(bad.validate(), Err(BackendError::Config(_))));
        let bad = BackendConfig {
            endpoint: "ftp://x".into(),
            ..BackendConfig::new(BackendKind::Llm)
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn config_from_toml_keeps_defaults() {
        let c: BackendConfig = toml::from_str("kind = \"llm\"\nmax_retries = 0").unwrap();
        assert_eq!(c.kind, BackendKind::Llm);
        assert_eq!(c.max_retries, 0);
        assert_eq!(c.temperature, 0.0);
        assert_eq!(c.model, "gpt-4");
        assert!(toml::from_str::<BackendConfig>("api_key = \"x\"").is_err());
    }

    #[test]
    fn kind_round_trip() {
        for k in [BackendKind::Llm, BackendKind::Rules] {
            assert_eq!(k.to_string().parse::<BackendKind>().unwrap(), k);
        }
        assert!("gpt".parse::<BackendKind>().is_err());
    }
}
