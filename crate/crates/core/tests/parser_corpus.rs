// SPDX-License-Identifier: Apache-2.0

mod common;

use std::time::Instant;

#[test]
fn corpus_parses_losslessly_and_round_trips() {
    let files = common::sol_files(&common::fixtures().join("parser"));
    assert!(files.len() >= 30, "only {} fixtures", files.len());
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut nodes = 0;
    for f in &files {
        match common::check_fixture(f) {
            Ok(n) => nodes += n,
            Err(e) => failures.push(format!("{}: {e}", f.display())),
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
    assert!(nodes > 500, "{nodes}");
    assert!(started.elapsed().as_secs_f64() < 5.0);
}
