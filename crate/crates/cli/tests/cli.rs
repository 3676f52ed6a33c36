// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scvd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scvd"))
        .args(args)
        .current_dir(root())
        .env_remove("SCVD_API_KEY")
        .env_remove("SCVD_API_BASE")
        .env_remove("SCVD_MODEL")
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut stream = serde_json::Deserializer::from_str(&text).into_iter::<serde_json::Value>();
    let doc = stream.next().expect("one document").expect("valid json");
    assert!(stream.next().is_none(), "more than one JSON document on stdout");
    doc
}

const VAULT_WITHDRAW: [&str; 8] = [
    "--project",
    "fixtures/vault",
    "--contract",
    "Vault",
    "--function",
    "withdraw",
    "--category",
    "reentrancy",
];

#[test]
fn detect_vulnerable_vault_exits_one() {
    let mut args = vec!["detect", "--backend", "rules"];
    args.extend(VAULT_WITHDRAW);
    let out = scvd(&args);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["is_vulnerable"], true);
    assert_eq!(v["code_snippet"], "balances[msg.sender] -= amount;");
    assert_eq!(v["backend"], "rules");
}

#[test]
fn detect_safe_target_exits_zero() {
    let out = scvd(&[
        "detect", "--backend", "rules", "--project", "fixtures/vault", "--contract", "Vault",
        "--function", "sweep", "--category", "reentrancy",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["is_vulnerable"], false);
}

#[test]
fn parse_json_exits_zero() {
    let out = scvd(&["parse", "fixtures/ok.sol", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "SourceUnit");
    assert_eq!(v["contracts"][0]["name"], "Greeter");
}

#[test]
fn parse_error_exits_two() {
    let out = scvd(&["parse", "fixtures/synthetic/broken/Broken.sol", "--json"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("Broken.sol:5:"), "{err}");
}

#[test]
fn llm_without_key_exits_three() {
    let mut args = vec!["detect", "--backend", "llm"];
    args.extend(VAULT_WITHDRAW);
    let out = scvd(&args);
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("authentication") && err.contains("SCVD_API_KEY"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&scvd(&["detect", "--project", "fixtures/vault"])), 2);
    assert_eq!(code(&scvd(&["frobnicate"])), 2);
    let mut args = vec!["detect", "--backend", "rules"];
    args.extend(VAULT_WITHDRAW);
    let last = args.len() - 1;
    args[last] = "oracle_manipulation";
    assert_eq!(code(&scvd(&args)), 2);

    let mut args = vec!["extract"];
    args.extend(VAULT_WITHDRAW);
    args[6] = "missing";
    let out = scvd(&args);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scvd.toml");
    std::fs::write(&config, "api_key = \"secret\"\n").unwrap();
    let mut args = vec!["detect", "--config", config.to_str().unwrap(), "--backend", "rules"];
    args.extend(VAULT_WITHDRAW);
    assert_eq!(code(&scvd(&args)), 2);
}

#[test]
fn extract_matches_golden() {
    let mut args = vec!["extract"];
    args.extend(VAULT_WITHDRAW);
    let out = scvd(&args);
    assert_eq!(code(&out), 0);
    let golden = std::fs::read_to_string(root().join("fixtures/golden/vault_withdraw.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn prompt_text_and_json() {
    let mut args = vec!["prompt"];
    args.extend(VAULT_WITHDRAW);
    let out = scvd(&args);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("### Instruction\n"));

    args.push("--json");
    let out = scvd(&args);
    let v = stdout_json(&out);
    assert_eq!(v["text"].as_str().unwrap().trim_end(), text.trim_end());
    assert!(v["token_count"].as_u64().unwrap() <= 4000);
}

#[test]
fn eval_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = scvd(&[
        "eval", "--manifest", "fixtures/synthetic/manifest.jsonl", "--category", "all",
        "--backend", "rules", "--seed", "3", "--neg-ratio", "1.5", "--out",
        out_dir.to_str().unwrap(), "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["runs"]["reentrancy"]["positives"], 6);
    assert_eq!(v["runs"]["reentrancy"]["negatives"], 8);
    assert!(v["average"]["positive_recall"].as_f64().unwrap() > 0.8);
    for name in ["report.md", "report.json", "records.jsonl", "errors.jsonl"] {
        assert!(out_dir.join(name).is_file(), "{name}");
    }
    let md = std::fs::read_to_string(out_dir.join("report.md")).unwrap();
    assert!(md.contains("| **Average** |"));
    let errors = std::fs::read_to_string(out_dir.join("errors.jsonl")).unwrap();
    assert!(errors.contains("\"stage\":\"detect\""));
}

#[test]
fn eval_with_llm_and_no_key_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = scvd(&[
        "eval", "--manifest", "fixtures/synthetic/manifest.jsonl", "--category", "reentrancy",
        "--backend", "llm", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
}

/// Flags listed in the first column of each table under `## scvd <cmd>` and
/// `## Global options` in the book's command-line chapter.
fn documented_flags() -> BTreeMap<String, Vec<String>> {
    let text = std::fs::read_to_string(root().join("book/src/cli.md")).unwrap();
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut section = None;
    for line in text.lines() {
        if let Some(h) = line.strip_prefix("## ") {
            section = match h {
                "Global options" => Some(String::new()),
                _ => h.strip_prefix("scvd ").map(str::to_string),
            };
            continue;
        }
        let (Some(s), Some(cell)) = (&section, line.strip_prefix("| `--")) else {
            continue;
        };
        let flag: String = cell.chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '-').collect();
        out.entry(s.clone()).or_default().push(format!("--{flag}"));
    }
    out
}

#[test]
fn help_lists_every_documented_flag() {
    let docs = documented_flags();
    assert_eq!(
        docs.keys().map(String::as_str).collect::<Vec<_>>(),
        ["", "detect", "eval", "extract", "parse", "prompt"]
    );
    let inherits: BTreeMap<&str, Vec<&str>> = BTreeMap::from([
        ("prompt", vec!["extract"]),
        ("detect", vec!["extract", "prompt"]),
    ]);
    for (cmd, flags) in &docs {
        let args: Vec<&str> = if cmd.is_empty() { vec!["--help"] } else { vec![cmd, "--help"] };
        let out = scvd(&args);
        assert_eq!(code(&out), 0);
        let help = String::from_utf8(out.stdout).unwrap();
        let mut wanted: Vec<&String> = flags.iter().chain(&docs[""]).collect();
        for parent in inherits.get(cmd.as_str()).into_iter().flatten() {
            wanted.extend(docs[*parent].iter().filter(|f| *f != "--json"));
        }
        for flag in wanted {
            assert!(help.contains(flag.as_str()), "`scvd {cmd} --help` lacks {flag}");
        }
    }
}
