// SPDX-License-Identifier: Apache-2.0

mod common;

use proptest::prelude::*;
use scvd::context::extract_context;
use scvd::project::{load_project, VulnCategory};
use scvd::prompt::{assemble_prompt, ExampleStore, PromptError, DEFAULT_BUDGET};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn assemblies_respect_the_budget(bundle in common::gen::bundle(), store in common::gen::store()) {
        if let Err(e) = common::check_budget(&bundle, &store, DEFAULT_BUDGET) {
            prop_assert!(false, "{}", e);
        }
    }
}

#[test]
fn golden_bundles_fit_with_bundled_store() {
    let store = ExampleStore::bundled();
    for case in common::golden_cases() {
        let root = common::fixtures().join("golden").join(&case.project);
        let model = load_project(&root, &Default::default()).unwrap();
        let target = model.find_function(&case.contract, &case.function, None).unwrap();
        let bundle = extract_context(&model, &target, case.category, case.depth).unwrap();
        let p = assemble_prompt(case.category, &bundle, &store, DEFAULT_BUDGET).unwrap();
        assert_eq!(p.sections.len(), 4);
        assert!(p.token_count <= DEFAULT_BUDGET, "{}", case.name);
    }
}

#[test]
fn oversized_callstack_drops_in_order() {
    let bundle = scvd::context::ContextBundle {
        target_function: "function f() external { a = 1; }".into(),
        imports: vec!["import \"./A.sol\";".into()],
        events: vec!["event E();".into()],
        callstack: (0..40)
            .map(|i| scvd::context::CallstackEntry {
                signature: format!("C.g{i}()"),
                source: format!("function g{i}() internal {{ {} }}", "x = x + 1; ".repeat(40)),
            })
            .collect(),
        modifiers_codes: vec!["modifier m() { _; }".repeat(50)],
        internal_states: vec!["uint256 a;".into(), "uint256 unused;".into()],
        ..Default::default()
    };
    let store = ExampleStore::bundled();
    let p = assemble_prompt(VulnCategory::Reentrancy, &bundle, &store, 2200).unwrap();
    let fields: Vec<&str> = p.dropped.iter().map(|d| d.field.as_str()).collect();
    let first = |f: &str| fields.iter().position(|x| *x == f).unwrap();
    assert!(first("events") < first("imports"));
    assert!(first("imports") < first("callstack"));
    assert!(p.dropped.iter().any(|d| d.item.as_deref() == Some("C.g39()")));
    assert!(matches!(
        assemble_prompt(VulnCategory::Reentrancy, &bundle, &store, 50),
        Err(PromptError::BudgetImpossible { .. })
    ));
}
