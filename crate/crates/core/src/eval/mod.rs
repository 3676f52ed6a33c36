// SPDX-License-Identifier: Apache-2.0

//! Labeled datasets, seeded sampling, batch runs and metric reports.

mod metrics;
mod run;

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::project::VulnCategory;

pub use metrics::{
    compute_metrics, mean_defined, render_report, round2, ConfusionMatrix, Metrics, Report,
};
pub use run::{run_eval, EvalRun, InstanceError, InstanceRecord, PipelineConfig, Stage};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("manifest line {line}: {message}")]
    ManifestInvalid { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("no positive instances for category `{0}`")]
    NoPositives(VulnCategory),
    #[error("negative ratio {0} is outside [1, 2]")]
    InvalidRatio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub id: String,
    /// Project root, relative to the manifest's directory unless absolute.
    pub project: PathBuf,
    pub contract: String,
    pub function: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<String>,
    pub category: VulnCategory,
    pub label: Label,
    /// Audit report the label came from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetManifest {
    /// Directory relative project paths are resolved against.
    pub base_dir: PathBuf,
    pub instances: Vec<Instance>,
}

impl DatasetManifest {
    pub fn project_root(&self, instance: &Instance) -> PathBuf {
        if instance.project.is_absolute() {
            instance.project.clone()
        } else {
            self.base_dir.join(&instance.project)
        }
    }
}

/// Parse JSONL text. Blank lines are skipped; line numbers are 1-based.
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<DatasetManifest, EvalError> {
    let mut instances: Vec<Instance> = Vec::new();
    let mut ids = HashSet::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let instance: Instance =
            serde_json::from_str(line).map_err(|e| EvalError::ManifestInvalid {
                line: line_no,
                message: e.to_string(),
            })?;
        if instance.id.is_empty() {
            return Err(EvalError::ManifestInvalid {
                line: line_no,
                message: "empty id".into(),
            });
        }
        if !ids.insert(instance.id.clone()) {
            return Err(EvalError::ManifestInvalid {
                line: line_no,
                message: format!("duplicate id `{}`", instance.id),
            });
        }
        instances.push(instance);
    }
    Ok(DatasetManifest {
        base_dir: base_dir.to_path_buf(),
        instances,
    })
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|e| EvalError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, base)
}

pub fn manifest_to_jsonl(manifest: &DatasetManifest) -> String {
    manifest
        .instances
        .iter()
        .map(|i| serde_json::to_string(i).expect("instance serializes") + "\n")
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSet {
    pub category: VulnCategory,
    pub seed: u64,
    pub neg_ratio: f64,
    pub base_dir: PathBuf,
    /// Positives first, then negatives, each in manifest order.
    pub instances: Vec<Instance>,
    pub positives: usize,
    pub negatives: usize,
    pub warnings: Vec<String>,
}

impl EvalSet {
    pub fn project_root(&self, instance: &Instance) -> PathBuf {
        if instance.project.is_absolute() {
            instance.project.clone()
        } else {
            self.base_dir.join(&instance.project)
        }
    }

    pub fn ids(&self) -> Vec<&str> {
        self.instances.iter().map(|i| i.id.as_str()).collect()
    }
}

/// Pick `k` of `pool` uniformly without replacement, keeping pool order.
fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a Instance], k: usize) -> Vec<&'a Instance> {
    let mut idx = sample(rng, pool.len(), k.min(pool.len())).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| pool[i]).collect()
}

/// Seeded positive/negative selection for one category. Negatives are
/// `round(neg_ratio * positives)` draws from the category's negatives.
/// The generator is ChaCha8 seeded with `seed`.
pub fn sample_instances(
    manifest: &DatasetManifest,
    category: VulnCategory,
    seed: u64,
    neg_ratio: f64,
    max_pos: Option<usize>,
) -> Result<EvalSet, EvalError> {
    if !(1.0..=2.0).contains(&neg_ratio) {
        return Err(EvalError::InvalidRatio(neg_ratio));
    }
    let of = |label| -> Vec<&Instance> {
        manifest
            .instances
            .iter()
            .filter(|i| i.category == category && i.label == label)
            .collect()
    };
    let pos_pool = of(Label::Positive);
    let neg_pool = of(Label::Negative);
    if pos_pool.is_empty() {
        return Err(EvalError::NoPositives(category));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positives = match max_pos {
        Some(k) if k < pos_pool.len() => pick(&mut rng, &pos_pool, k),
        _ => pos_pool,
    };
    let wanted = (neg_ratio * positives.len() as f64).round() as usize;
    let mut warnings = Vec::new();
    if neg_pool.len() < wanted {
        warnings.push(format!(
            "{category}: wanted {wanted} negatives but the pool holds {}; using all of them",
            neg_pool.len()
        ));
    }
    let negatives = pick(&mut rng, &neg_pool, wanted);
    let (p, n) = (positives.len(), negatives.len());
    Ok(EvalSet {
        category,
        seed,
        neg_ratio,
        base_dir: manifest.base_dir.clone(),
        instances: positives.into_iter().chain(negatives).cloned().collect(),
        positives: p,
        negatives: n,
        warnings,
    })
}
