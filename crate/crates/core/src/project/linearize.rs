// SPDX-License-Identifier: Apache-2.0

//! C3 linearization with Solidity's base ordering.
//!
//! Solidity lists bases from "most base-like" to "most derived", so for
//! `contract C is A, B` the merge sees `B` before `A`.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearizationError {
    #[error("cannot linearize inheritance graph of `{contract}`: no consistent base order")]
    Inconsistent { contract: String },
    #[error("inheritance cycle through `{contract}`")]
    Cycle { contract: String },
}

/// Merge step of C3. Each input list is consumed from the front.
fn merge<K: Clone + Eq>(mut seqs: Vec<Vec<K>>) -> Option<Vec<K>> {
    let mut out = Vec::new();
    loop {
        seqs.retain(|s| !s.is_empty());
        if seqs.is_empty() {
            return Some(out);
        }
        let candidate = seqs.iter().map(|s| &s[0]).find(|head| {
            !seqs.iter().any(|s| s[1..].contains(head))
        })?;
        let candidate = candidate.clone();
        for s in &mut seqs {
            if s[0] == candidate {
                s.remove(0);
            }
        }
        out.push(candidate);
    }
}

/// Linearize every key of `bases` (key -> bases as written, left to right).
///
/// Names missing from the map are treated as roots without bases.
pub fn linearize_all<K>(
    bases: &HashMap<K, Vec<K>>,
    display: impl Fn(&K) -> String,
) -> HashMap<K, Result<Vec<K>, LinearizationError>>
where
    K: Clone + Eq + Hash,
{
    let mut memo: HashMap<K, Result<Vec<K>, LinearizationError>> = HashMap::new();
    for key in bases.keys() {
        let mut stack = Vec::new();
        let _ = linearize_one(key, bases, &display, &mut memo, &mut stack);
    }
    memo
}

fn linearize_one<K>(
    key: &K,
    bases: &HashMap<K, Vec<K>>,
    display: &impl Fn(&K) -> String,
    memo: &mut HashMap<K, Result<Vec<K>, LinearizationError>>,
    stack: &mut Vec<K>,
) -> Result<Vec<K>, LinearizationError>
where
    K: Clone + Eq + Hash,
{
    if let Some(done) = memo.get(key) {
        return done.clone();
    }
    if stack.contains(key) {
        return Err(LinearizationError::Cycle {
            contract: display(key),
        });
    }
    let direct = bases.get(key).cloned().unwrap_or_default();
    stack.push(key.clone());
    let mut seqs = Vec::new();
    let mut failure = None;
    for base in direct.iter().rev() {
        match linearize_one(base, bases, display, memo, stack) {
            Ok(l) => seqs.push(l),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    stack.pop();
    let result = match failure {
        Some(LinearizationError::Cycle { .. }) => Err(LinearizationError::Cycle {
            contract: display(key),
        }),
        Some(_) => Err(LinearizationError::Inconsistent {
            contract: display(key),
        }),
        None => {
            seqs.push(direct.iter().rev().cloned().collect());
            match merge(seqs) {
                Some(rest) => {
                    let mut out = vec![key.clone()];
                    out.extend(rest);
                    Ok(out)
                }
                None => Err(LinearizationError::Inconsistent {
                    contract: display(key),
                }),
            }
        }
    };
    if bases.contains_key(key) {
        memo.insert(key.clone(), result.clone());
    }
    result
}
