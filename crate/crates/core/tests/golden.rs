// SPDX-License-Identifier: Apache-2.0

mod common;

use scvd::context::{bundle_from_json, BUNDLE_FIELDS};

/// Set `SCVD_BLESS=1` to rewrite the golden files after reviewing a change.
#[test]
fn bundles_match_golden_files() {
    let bless = std::env::var_os("SCVD_BLESS").is_some();
    let cases = common::golden_cases();
    assert!(cases.len() >= 5);
    for case in &cases {
        let actual = common::golden_bundle(case);
        let path = common::golden_path(case);
        if bless {
            std::fs::write(&path, &actual).unwrap();
        }
        let expected = std::fs::read_to_string(&path).unwrap();
        assert_eq!(actual, expected, "{}", case.name);
        let v: serde_json::Value = serde_json::from_str(&expected).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, BUNDLE_FIELDS, "{}", case.name);
        assert!(bundle_from_json(&expected).is_ok());
    }
}
