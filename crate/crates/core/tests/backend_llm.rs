// SPDX-License-Identifier: Apache-2.0

mod common;

use std::time::{Duration, Instant};

use common::{completion, llm_config, StubServer};
use scvd::backend::{llm_request, parse_verdict, Backend, BackendError, LlmBackend, Verdict};
use scvd::context::extract_context;
use scvd::project::{load_project, VulnCategory};
use scvd::prompt::{assemble_prompt, ExampleStore};

#[test]
fn fixed_completion_is_returned_unchanged() {
    let text = "```json\n{\"is_vulnerable\": false}\n```";
    let server = StubServer::start(vec![(200, completion(text))]);
    let out = llm_request(&llm_config(&server.base), "hello").unwrap();
    assert_eq!(out, text);
    let requests = server.join();
    let body: serde_json::Value = serde_json::from_str(&requests[0]).unwrap();
    assert_eq!(body["messages"][0]["role"], "user");
    assert_eq!(body["model"], "gpt-4");
}

#[test]
fn retries_after_rate_limits() {
    let server = StubServer::start(vec![
        (429, "{}".into()),
        (429, "{}".into()),
        (200, completion("ok")),
    ]);
    let started = Instant::now();
    assert_eq!(llm_request(&llm_config(&server.base), "p").unwrap(), "ok");
    // 20ms then 40ms of backoff, each plus up to 10ms of jitter
    assert!(started.elapsed() >= Duration::from_millis(60));
    assert_eq!(server.join().len(), 3);
}

#[test]
fn gives_up_after_max_retries() {
    let server = StubServer::start(vec![(503, "{}".into()); 4]);
    let err = llm_request(&llm_config(&server.base), "p").unwrap_err();
    assert!(matches!(err, BackendError::BackendUnavailable { attempts: 4, .. }), "{err:?}");
    server.join();
}

#[test]
fn unreachable_endpoint() {
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let config = scvd::backend::BackendConfig {
        max_retries: 2,
        ..llm_config(&format!("http://127.0.0.1:{port}/v1"))
    };
    let err = llm_request(&config, "p").unwrap_err();
    assert!(matches!(err, BackendError::BackendUnavailable { attempts: 3, .. }), "{err:?}");
}

#[test]
fn rejected_credentials() {
    let server = StubServer::start(vec![(401, "{\"error\":\"bad key\"}".into())]);
    let err = llm_request(&llm_config(&server.base), "p").unwrap_err();
    assert!(matches!(err, BackendError::AuthError(_)));
    assert_eq!(server.join().len(), 1);
}

#[test]
fn missing_key_sends_nothing() {
    let config = scvd::backend::BackendConfig {
        api_key: None,
        ..llm_config("http://127.0.0.1:9/v1")
    };
    assert!(matches!(llm_request(&config, "p"), Err(BackendError::AuthError(_))));
}

#[test]
fn backend_sends_assembled_prompt_byte_exactly() {
    let root = common::fixtures().join("vault");
    let model = load_project(&root, &Default::default()).unwrap();
    let target = model.find_function("Vault", "withdraw", None).unwrap();
    let bundle = extract_context(&model, &target, VulnCategory::Reentrancy, 2).unwrap();
    let prompt = assemble_prompt(VulnCategory::Reentrancy, &bundle, &ExampleStore::bundled(), 4000).unwrap();

    let answer = "{\"is_vulnerable\": true, \"code_snippet\": \"balances[msg.sender] -= amount;\"}";
    let server = StubServer::start(vec![(200, completion(answer))]);
    let backend = LlmBackend::new(llm_config(&server.base));
    let verdict = backend.detect(VulnCategory::Reentrancy, &prompt, &model, &target).unwrap();
    let requests = server.join();
    let body: serde_json::Value = serde_json::from_str(&requests[0]).unwrap();
    assert_eq!(body["messages"][0]["content"].as_str().unwrap().as_bytes(), prompt.text.as_bytes());
    assert!(verdict.is_vulnerable);
    assert_eq!(verdict.backend, "llm");
    assert_eq!(verdict.raw_response.as_deref(), Some(answer));
}

#[test]
fn verdict_round_trips_through_parse() {
    let cases = [
        Verdict::safe("rules"),
        Verdict::vulnerable("llm", "x = 1;", Some(3)),
        Verdict {
            raw_response: Some("{}".into()),
            ..Verdict::vulnerable("llm", "a();", None)
        },
    ];
    for v in cases {
        assert_eq!(parse_verdict(&serde_json::to_string(&v).unwrap()).unwrap(), v);
    }
}
