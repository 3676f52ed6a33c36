// SPDX-License-Identifier: Apache-2.0

//! Chat-completion client with retry and a bound on requests in flight.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use rand::Rng;
use serde_json::{json, Value};

use super::{parse_verdict, Backend, BackendConfig, BackendError, Verdict};
use crate::project::{FunctionRef, ProjectModel, VulnCategory};
use crate::prompt::AssembledPrompt;

pub const LLM_BACKEND: &str = "llm";

/// The prompt goes out as a single user message, untouched.
pub fn chat_request_body(config: &BackendConfig, prompt: &str) -> Value {
    json!({
        "model": config.model,
        "temperature": config.temperature,
        "messages": [{ "role": "user", "content": prompt }],
    })
}

enum Attempt {
    Done(String),
    Retry(String),
    Fatal(BackendError),
}

fn backoff(config: &BackendConfig, retry: u32) -> Duration {
    let base = config.retry_base_ms.saturating_mul(1u64 << retry.min(16));
    let jitter = if config.retry_base_ms == 0 {
        0
    } else {
        rand::rng().random_range(0..=config.retry_base_ms / 2)
    };
    Duration::from_millis(base + jitter)
}

fn first_choice(body: &str) -> Option<String> {
    let v: Value = serde_json::from_str(body).ok()?;
    v.pointer("/choices/0/message/content")
        .or_else(|| v.pointer("/choices/0/text"))
        .and_then(Value::as_str)
        .map(str::to_string)
}

fn attempt(agent: &ureq::Agent, url: &str, key: &str, body: &str) -> Attempt {
    let response = agent
        .post(url)
        .header("Authorization", &format!("Bearer {key}"))
        .header("Content-Type", "application/json")
        .send(body);
    let mut response = match response {
        Ok(r) => r,
        Err(e) => return Attempt::Retry(e.to_string()),
    };
    let status = response.status().as_u16();
    let text = response.body_mut().read_to_string().unwrap_or_default();
    match status {
        200..=299 => match first_choice(&text) {
            Some(content) => Attempt::Done(content),
            None => Attempt::Fatal(BackendError::UnparseableResponse(
                text.chars().take(200).collect(),
            )),
        },
        401 | 403 => Attempt::Fatal(BackendError::AuthError(format!("endpoint answered {status}"))),
        408 | 429 | 500..=599 => Attempt::Retry(format!("endpoint answered {status}")),
        _ => Attempt::Fatal(BackendError::BackendUnavailable {
            attempts: 1,
            message: format!("endpoint answered {status}: {}", text.chars().take(200).collect::<String>()),
        }),
    }
}

/// Send `prompt` as one chat-completion request and return the first
/// choice's text. Transport errors, 429 and 5xx are retried with
/// exponential backoff.
pub fn llm_request(config: &BackendConfig, prompt: &str) -> Result<String, BackendError> {
    let key = config
        .api_key
        .as_deref()
        .ok_or_else(|| BackendError::AuthError(format!("{} is not set", super::API_KEY_VAR)))?;
    config.validate()?;
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
        .http_status_as_error(false)
        .build()
        .into();
    let url = format!("{}/chat/completions", config.endpoint.trim_end_matches('/'));
    let body = chat_request_body(config, prompt).to_string();
    let mut last = String::new();
    for n in 0..=config.max_retries {
        if n > 0 {
            let delay = backoff(config, n - 1);
            log::warn!("retrying in {delay:?} after: {last}");
            std::thread::sleep(delay);
        }
        match attempt(&agent, &url, key, &body) {
            Attempt::Done(text) => return Ok(text),
            Attempt::Retry(message) => last = message,
            Attempt::Fatal(BackendError::BackendUnavailable { message, .. }) => {
                return Err(BackendError::BackendUnavailable {
                    attempts: n + 1,
                    message,
                })
            }
            Attempt::Fatal(e) => return Err(e),
        }
    }
    Err(BackendError::BackendUnavailable {
        attempts: config.max_retries + 1,
        message: last,
    })
}

/// Counting semaphore for requests in flight.
#[derive(Debug)]
struct Slots {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Slots {
    fn acquire(&self) -> SlotGuard<'_> {
        let mut free = self.free.lock().expect("slot lock");
        while *free == 0 {
            free = self.cv.wait(free).expect("slot lock");
        }
        *free -= 1;
        SlotGuard(self)
    }
}

struct SlotGuard<'a>(&'a Slots);

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("slot lock") += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Debug)]
pub struct LlmBackend {
    config: BackendConfig,
    slots: Slots,
}

impl LlmBackend {
    pub fn new(config: BackendConfig) -> Self {
        let slots = Slots {
            free: Mutex::new(config.max_concurrency.max(1)),
            cv: Condvar::new(),
        };
        LlmBackend { config, slots }
    }
}

impl Backend for LlmBackend {
    fn id(&self) -> &'static str {
        LLM_BACKEND
    }

    fn detect(
        &self,
        _category: VulnCategory,
        prompt: &AssembledPrompt,
        _model: &ProjectModel,
        _target: &FunctionRef,
    ) -> Result<Verdict, BackendError> {
        let raw = {
            let _slot = self.slots.acquire();
            llm_request(&self.config, &prompt.text)?
        };
        let mut verdict = parse_verdict(&raw)?;
        verdict.backend = LLM_BACKEND.to_string();
        verdict.raw_response = Some(raw);
        Ok(verdict)
    }
}
