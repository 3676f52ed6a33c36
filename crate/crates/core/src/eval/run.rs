// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConfusionMatrix, EvalSet, Instance, Label};
use crate::backend::{make_backend, Backend, BackendConfig, Verdict};
use crate::context::{extract_context, DEFAULT_DEPTH};
use crate::project::{load_project, FilterConfig, ProjectModel, VulnCategory};
use crate::prompt::{assemble_prompt_with, ExampleStore, PromptOptions};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub backend: BackendConfig,
    pub filter: FilterConfig,
    pub depth: usize,
    pub prompt: PromptOptions,
    pub store: ExampleStore,
}

impl PipelineConfig {
    pub fn new(backend: BackendConfig) -> Self {
        PipelineConfig {
            backend,
            filter: FilterConfig::default(),
            depth: DEFAULT_DEPTH,
            prompt: PromptOptions::default(),
            store: ExampleStore::bundled(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Load,
    Target,
    Extract,
    Prompt,
    Detect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub category: VulnCategory,
    pub label: Label,
    pub verdict: Verdict,
    pub prompt_tokens: usize,
}

impl InstanceRecord {
    pub fn correct(&self) -> bool {
        self.verdict.is_vulnerable == (self.label == Label::Positive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceError {
    pub id: String,
    pub stage: Stage,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRun {
    /// Sorted by instance id.
    pub records: Vec<InstanceRecord>,
    /// Instances dropped from the matrix, sorted by id.
    pub errors: Vec<InstanceError>,
    pub matrix: ConfusionMatrix,
}

impl EvalRun {
    pub fn matrix_of(records: &[InstanceRecord]) -> ConfusionMatrix {
        let mut m = ConfusionMatrix::default();
        for r in records {
            m.record(r.label == Label::Positive, r.verdict.is_vulnerable);
        }
        m
    }
}

type Loaded = HashMap<PathBuf, Result<Arc<ProjectModel>, String>>;

fn evaluate(
    set: &EvalSet,
    instance: &Instance,
    projects: &Loaded,
    config: &PipelineConfig,
    backend: &dyn Backend,
) -> Result<InstanceRecord, InstanceError> {
    let fail = |stage, message: String| InstanceError {
        id: instance.id.clone(),
        stage,
        message,
    };
    let model = projects[&set.project_root(instance)]
        .as_ref()
        .map_err(|e| fail(Stage::Load, e.clone()))?;
    let target = model
        .find_function(&instance.contract, &instance.function, instance.signature.as_deref())
        .map_err(|e| fail(Stage::Target, e.to_string()))?;
    let bundle = extract_context(model, &target, instance.category, config.depth)
        .map_err(|e| fail(Stage::Extract, e.to_string()))?;
    let prompt = assemble_prompt_with(instance.category, &bundle, &config.store, &config.prompt)
        .map_err(|e| fail(Stage::Prompt, e.to_string()))?;
    let verdict = backend
        .detect(instance.category, &prompt, model, &target)
        .map_err(|e| fail(Stage::Detect, e.to_string()))?;
    Ok(InstanceRecord {
        id: instance.id.clone(),
        category: instance.category,
        label: instance.label,
        verdict,
        prompt_tokens: prompt.token_count,
    })
}

/// Run every instance through load, extract, prompt and detect. Stage
/// failures are recorded per instance and left out of the matrix.
pub fn run_eval(set: &EvalSet, config: &PipelineConfig) -> EvalRun {
    let backend = match make_backend(&config.backend) {
        Ok(b) => b,
        Err(e) => {
            let mut errors: Vec<InstanceError> = set
                .instances
                .iter()
                .map(|i| InstanceError {
                    id: i.id.clone(),
                    stage: Stage::Detect,
                    message: e.to_string(),
                })
                .collect();
            errors.sort_by(|a, b| a.id.cmp(&b.id));
            return EvalRun {
                records: Vec::new(),
                errors,
                matrix: ConfusionMatrix::default(),
            };
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.backend.max_concurrency.max(1))
        .build()
        .expect("thread pool");

    let roots: BTreeSet<PathBuf> = set.instances.iter().map(|i| set.project_root(i)).collect();
    let projects: Loaded = pool.install(|| {
        roots
            .into_par_iter()
            .map(|root| {
                let model = load_project(&root, &config.filter)
                    .map_err(|e| e.to_string())
                    .and_then(|m| match (m.units.is_empty(), m.diagnostics.first()) {
                        (true, Some(d)) => Err(format!("{}: {}", d.path, d.message)),
                        _ => Ok(Arc::new(m)),
                    });
                (root, model)
            })
            .collect()
    });

    let outcomes: Vec<Result<InstanceRecord, InstanceError>> = pool.install(|| {
        set.instances
            .par_iter()
            .map(|i| evaluate(set, i, &projects, config, backend.as_ref()))
            .collect()
    });
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => {
                log::warn!("{} failed at {:?}: {}", e.id, e.stage, e.message);
                errors.push(e);
            }
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    errors.sort_by(|a, b| a.id.cmp(&b.id));
    EvalRun {
        matrix: EvalRun::matrix_of(&records),
        records,
        errors,
    }
}
