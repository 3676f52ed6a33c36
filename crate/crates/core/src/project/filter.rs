// SPDX-License-Identifier: Apache-2.0

//! Coarse filtering: which `.sol` files under a project root are analyzed.

use std::path::Path;

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};

use super::ProjectError;

/// One exclusion glob and the reason recorded for files it matches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludeRule {
    pub glob: String,
    pub reason: String,
}

impl ExcludeRule {
    pub fn new(glob: impl Into<String>, reason: impl Into<String>) -> Self {
        ExcludeRule {
            glob: glob.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub rules: Vec<ExcludeRule>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            rules: default_rules(),
        }
    }
}

pub fn default_rules() -> Vec<ExcludeRule> {
    vec![
        ExcludeRule::new("**/test/**", "test-glob"),
        ExcludeRule::new("**/tests/**", "test-glob"),
        ExcludeRule::new("**/*.t.sol", "test-glob"),
        ExcludeRule::new("**/mocks/**", "mock-glob"),
        ExcludeRule::new("**/node_modules/**", "vendored-glob"),
        ExcludeRule::new("**/lib/**", "vendored-glob"),
        ExcludeRule::new("**/script/**", "script-glob"),
    ]
}

/// `scvd.toml` keys relevant to filtering.
#[derive(Debug, Default, Deserialize)]
struct ConfigFile {
    #[serde(default)]
    exclude: Vec<String>,
    default_excludes: Option<bool>,
}

impl FilterConfig {
    /// No exclusions at all.
    pub fn empty() -> Self {
        FilterConfig { rules: Vec::new() }
    }

    /// Defaults, adjusted by a config file's `exclude = [...]` (appended) and
    /// `default_excludes = false` (drops the built-in globs).
    pub fn from_toml_str(text: &str) -> Result<Self, ProjectError> {
        let cfg: ConfigFile =
            toml::from_str(text).map_err(|e| ProjectError::Config(e.to_string()))?;
        let mut rules = if cfg.default_excludes.unwrap_or(true) {
            default_rules()
        } else {
            Vec::new()
        };
        rules.extend(cfg.exclude.into_iter().map(|g| ExcludeRule::new(g, "config-glob")));
        Ok(FilterConfig { rules })
    }

    /// Read `scvd.toml` from `root` when present, otherwise the defaults.
    pub fn for_project(root: &Path) -> Result<Self, ProjectError> {
        let path = root.join("scvd.toml");
        if !path.is_file() {
            return Ok(FilterConfig::default());
        }
        let text = std::fs::read_to_string(&path).map_err(|e| ProjectError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    /// Append an exclusion given on the command line.
    pub fn with_exclude(mut self, glob: impl Into<String>) -> Self {
        self.rules.push(ExcludeRule::new(glob, "cli-glob"));
        self
    }

    pub(crate) fn compile(&self) -> Result<CompiledFilter, ProjectError> {
        let mut builder = GlobSetBuilder::new();
        for rule in &self.rules {
            let glob = Glob::new(&rule.glob)
                .map_err(|e| ProjectError::Config(format!("bad glob `{}`: {e}", rule.glob)))?;
            builder.add(glob);
        }
        let set = builder
            .build()
            .map_err(|e| ProjectError::Config(e.to_string()))?;
        Ok(CompiledFilter {
            set,
            reasons: self.rules.iter().map(|r| r.reason.clone()).collect(),
        })
    }
}

pub(crate) struct CompiledFilter {
    set: GlobSet,
    reasons: Vec<String>,
}

impl CompiledFilter {
    /// Reason of the first rule matching the project-relative `path`.
    pub fn exclusion_reason(&self, path: &str) -> Option<&str> {
        self.set
            .matches(path)
            .into_iter()
            .min()
            .map(|i| self.reasons[i].as_str())
    }
}
