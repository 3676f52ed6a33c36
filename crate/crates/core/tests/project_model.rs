// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::BTreeMap;
use std::fs;

use scvd::ast::visit::walk_block_expressions;
use scvd::ast::Expression;
use scvd::project::{
    candidate_functions, linearize_inheritance, load_project, CallKind, FilterConfig,
    LinearizationError, ProjectError, ProjectModel, VulnCategory,
};
use serde_json::Value;

use common::{fixtures, sol_files};

fn model_of(path: &std::path::Path) -> ProjectModel {
    let name = path.file_name().unwrap().to_string_lossy().into_owned();
    ProjectModel::from_sources(&[(name, fs::read_to_string(path).unwrap())])
}

#[test]
fn linearization_shapes() {
    let dir = fixtures().join("linearization");
    let expected: BTreeMap<String, Value> =
        serde_json::from_str(&fs::read_to_string(dir.join("expected.json")).unwrap()).unwrap();
    let files = sol_files(&dir);
    assert_eq!(files.len(), 10);
    for path in files {
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let file = path.file_name().unwrap().to_string_lossy().into_owned();
        let model = model_of(&path);
        let want = expected[&stem].as_object().unwrap();
        let got = linearize_inheritance(&model);
        if let Some(contract) = want.get("error") {
            let contract = contract.as_str().unwrap();
            match got {
                Err(LinearizationError::Inconsistent { contract: c }) => {
                    assert!(c.ends_with(contract), "{stem}: {c}")
                }
                other => panic!("{stem}: expected inconsistency, got {other:?}"),
            }
            continue;
        }
        let got = got.unwrap_or_else(|e| panic!("{stem}: {e}"));
        assert_eq!(got.len(), want.len(), "{stem}");
        for (name, order) in want {
            let order: Vec<String> = serde_json::from_value(order.clone()).unwrap();
            assert_eq!(got[&format!("{file}:{name}")], order, "{stem}: {name}");
        }
    }
}

#[test]
fn inheritance_cycle_is_reported() {
    let model = ProjectModel::from_sources(&[(
        "C.sol",
        "contract A is B {}\ncontract B is A {}\n",
    )]);
    assert!(matches!(
        linearize_inheritance(&model),
        Err(LinearizationError::Cycle { .. })
    ));
}

#[test]
fn default_filter_drops_tests_and_vendored_code() {
    let dir = tempfile::tempdir().unwrap();
    for (path, text) in [
        ("contracts/Vault.sol", "contract Vault { function f() external {} }\n"),
        ("test/VaultTest.sol", "contract VaultTest {}\n"),
        ("node_modules/oz/ERC20.sol", "contract ERC20 {}\n"),
    ] {
        let p = dir.path().join(path);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, text).unwrap();
    }
    let model = load_project(dir.path(), &FilterConfig::default()).unwrap();
    let kept: Vec<&str> = model.units.iter().map(|u| u.path.as_str()).collect();
    assert_eq!(kept, ["contracts/Vault.sol"]);
    let reasons: BTreeMap<&str, &str> = model
        .excluded
        .iter()
        .map(|e| (e.path.as_str(), e.reason.as_str()))
        .collect();
    assert_eq!(
        reasons,
        BTreeMap::from([
            ("node_modules/oz/ERC20.sol", "vendored-glob"),
            ("test/VaultTest.sol", "test-glob"),
        ])
    );

    let everything = load_project(dir.path(), &FilterConfig::empty()).unwrap();
    assert_eq!(everything.units.len(), 3);
    assert!(everything.excluded.is_empty());
}

#[test]
fn filter_partitions_the_source_set() {
    let root = fixtures().join("vault");
    let model = load_project(&root, &FilterConfig::default()).unwrap();
    let all = load_project(&root, &FilterConfig::empty()).unwrap();
    let mut union: Vec<&str> = model
        .units
        .iter()
        .map(|u| u.path.as_str())
        .chain(model.excluded.iter().map(|e| e.path.as_str()))
        .collect();
    union.sort();
    let every: Vec<&str> = all.units.iter().map(|u| u.path.as_str()).collect();
    assert_eq!(union, every);
    for e in &model.excluded {
        assert!(model.units.iter().all(|u| u.path != e.path));
    }
}

#[test]
fn single_file_and_empty_projects() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        load_project(dir.path(), &FilterConfig::default()),
        Err(ProjectError::NoSourcesFound(_))
    ));
    fs::write(dir.path().join("Only.sol"), "contract Only { function f() public {} }\n").unwrap();
    let model = load_project(dir.path(), &FilterConfig::default()).unwrap();
    assert_eq!(model.units.len(), 1);
    assert!(model.find_function("Only", "f", None).is_ok());
}

fn call_count(model: &ProjectModel) -> usize {
    let mut n = 0;
    for id in model.callable_ids() {
        if let Some(body) = model.callable(id).body() {
            walk_block_expressions(body, &mut |e| {
                n += matches!(e, Expression::FunctionCall { .. }) as usize
            });
        }
    }
    n
}

#[test]
fn every_call_site_becomes_one_edge() {
    let mut checked = 0;
    for path in sol_files(&fixtures().join("parser")) {
        let model = model_of(&path);
        let graph = &model.call_graph;
        assert_eq!(graph.edges.len(), call_count(&model), "{}", path.display());
        for e in &graph.edges {
            if e.kind == CallKind::External {
                assert!(!e.call_text.trim_start().starts_with("super."), "{}", e.call_text);
            }
        }
        checked += graph.edges.len();
    }
    assert!(checked > 50, "only {checked} call sites in the corpus");
}

#[test]
fn emits_and_super_calls_are_not_external() {
    let model = ProjectModel::from_sources(&[(
        "T.sol",
        r#"
interface IToken { function transfer(address to, uint256 v) external returns (bool); }
contract Base { function hook() internal virtual {} }
contract T is Base {
    event Moved(uint256 v);
    IToken token;
    function hook() internal override { super.hook(); }
    function f(uint256 v) external {
        emit Moved(v);
        hook();
        token.transfer(msg.sender, v);
    }
}
"#,
    )]);
    let f = model.find_function("T", "f", None).unwrap();
    let kinds: Vec<CallKind> = model.call_graph.edges_from(f.id).map(|e| e.kind).collect();
    assert_eq!(kinds, [CallKind::EventEmit, CallKind::Internal, CallKind::External]);
    let hook = model.find_function("T", "hook", None).unwrap();
    let kinds: Vec<CallKind> = model.call_graph.edges_from(hook.id).map(|e| e.kind).collect();
    assert_eq!(kinds, [CallKind::SuperCall]);
}

#[test]
fn target_lookup() {
    let model = load_project(&fixtures().join("vault"), &FilterConfig::default()).unwrap();
    match model.find_function("Vault", "deposit", None) {
        Err(ProjectError::AmbiguousTarget { candidates, .. }) => assert_eq!(
            candidates,
            ["Vault.deposit(uint256)", "Vault.deposit(uint256,address)"]
        ),
        other => panic!("{other:?}"),
    }
    let f = model
        .find_function("Vault", "deposit", Some("uint256, address"))
        .unwrap();
    assert_eq!(f.signature, "(uint256,address)");
    assert!(matches!(
        model.find_function("Vault", "missing", None),
        Err(ProjectError::NotFound(_))
    ));
    assert!(matches!(
        model.find_function("Nope", "withdraw", None),
        Err(ProjectError::NotFound(_))
    ));
}

#[test]
fn vault_candidates() {
    let model = load_project(&fixtures().join("vault"), &FilterConfig::default()).unwrap();
    let names = |c| -> Vec<String> {
        candidate_functions(&model, c)
            .iter()
            .map(|f| f.qualified())
            .collect()
    };
    assert_eq!(
        names(VulnCategory::Reentrancy),
        [
            "Vault.deposit(uint256,address)",
            "Vault.withdraw(uint256)",
            "Vault.sweep(address)",
            "Vault._send(address,uint256)",
        ]
    );
    assert_eq!(
        names(VulnCategory::Centralization),
        [
            "Ownable.transferOwnership(address)",
            "Vault.withdraw(uint256)",
            "Vault.sweep(address)",
        ]
    );
}
