// SPDX-License-Identifier: Apache-2.0

mod common;

use scvd::backend::{rule_detect, BackendError, RULE_CATEGORIES};
use scvd::project::{ProjectModel, VulnCategory};

#[test]
fn conformance_suite_agrees_with_hand_labels() {
    let cases = common::reentrancy_cases();
    assert_eq!(cases.len(), 12);
    let failures: Vec<String> = cases
        .iter()
        .filter_map(|(c, src)| common::check_reentrancy_case(c, src).err())
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn every_vulnerable_case_has_a_transfer_mutant() {
    for (c, _) in common::reentrancy_cases() {
        assert_eq!(c.vulnerable, c.transfer.is_some(), "{}", c.id);
    }
}

#[test]
fn rule_engine_is_deterministic() {
    for (c, src) in common::reentrancy_cases() {
        assert_eq!(common::rules_verdict(&c, &src), common::rules_verdict(&c, &src));
    }
}

#[test]
fn vault_withdraw_is_flagged() {
    let root = common::fixtures().join("vault");
    let model = scvd::project::load_project(&root, &Default::default()).unwrap();
    let target = model.find_function("Vault", "withdraw", None).unwrap();
    let v = rule_detect(VulnCategory::Reentrancy, &model, &target).unwrap();
    assert!(v.is_vulnerable);
    assert_eq!(v.code_snippet.as_deref(), Some("balances[msg.sender] -= amount;"));
    assert_eq!(v.line, Some(4));
    assert_eq!(v.backend, "rules");
}

#[test]
fn judgment_categories_are_unsupported() {
    let model = ProjectModel::from_sources(&[("A.sol", "contract A { function f() external {} }")]);
    let f = model.find_function("A", "f", None).unwrap();
    for c in VulnCategory::ALL {
        let r = rule_detect(c, &model, &f);
        if RULE_CATEGORIES.contains(&c) {
            assert!(r.is_ok(), "{c}");
        } else {
            assert_eq!(r, Err(BackendError::UnsupportedCategory(c)));
        }
    }
}

#[test]
fn constant_optimization_quotes_the_declaration() {
    let src = "contract A { uint256 rate = 5; uint256 other;
        function set(uint256 v) external { other = v; }
        function f() external view returns (uint256) { return rate * 2; } }";
    let model = ProjectModel::from_sources(&[("A.sol", src)]);
    let f = model.find_function("A", "f", None).unwrap();
    let v = rule_detect(VulnCategory::ConstantOptimization, &model, &f).unwrap();
    assert_eq!(v.code_snippet.as_deref(), Some("uint256 rate = 5;"));
    let set = model.find_function("A", "set", None).unwrap();
    assert!(!rule_detect(VulnCategory::ConstantOptimization, &model, &set).unwrap().is_vulnerable);
}
