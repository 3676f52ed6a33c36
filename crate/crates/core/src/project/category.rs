// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The thirteen vulnerability categories the toolchain knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VulnCategory {
    Reentrancy,
    MissingEvent,
    Centralization,
    InputValidation,
    WeakRandomness,
    SandwichAttack,
    RedundantStatements,
    FlashloanAttack,
    TooManyDigits,
    ErrorMessage,
    ConstantOptimization,
    ReturnValueCheck,
    DivisionBeforeMultiplication,
}

impl VulnCategory {
    pub const ALL: [VulnCategory; 13] = [
        VulnCategory::Reentrancy,
        VulnCategory::MissingEvent,
        VulnCategory::Centralization,
        VulnCategory::InputValidation,
        VulnCategory::WeakRandomness,
        VulnCategory::SandwichAttack,
        VulnCategory::RedundantStatements,
        VulnCategory::FlashloanAttack,
        VulnCategory::TooManyDigits,
        VulnCategory::ErrorMessage,
        VulnCategory::ConstantOptimization,
        VulnCategory::ReturnValueCheck,
        VulnCategory::DivisionBeforeMultiplication,
    ];

    pub fn id(self) -> &'static str {
        match self {
            VulnCategory::Reentrancy => "reentrancy",
            VulnCategory::MissingEvent => "missing_event",
            VulnCategory::Centralization => "centralization",
            VulnCategory::InputValidation => "input_validation",
            VulnCategory::WeakRandomness => "weak_randomness",
            VulnCategory::SandwichAttack => "sandwich_attack",
            VulnCategory::RedundantStatements => "redundant_statements",
            VulnCategory::FlashloanAttack => "flashloan_attack",
            VulnCategory::TooManyDigits => "too_many_digits",
            VulnCategory::ErrorMessage => "error_message",
            VulnCategory::ConstantOptimization => "constant_optimization",
            VulnCategory::ReturnValueCheck => "return_value_check",
            VulnCategory::DivisionBeforeMultiplication => "division_before_multiplication",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            VulnCategory::Reentrancy => "Reentrancy",
            VulnCategory::MissingEvent => "Missing Event",
            VulnCategory::Centralization => "Centralization",
            VulnCategory::InputValidation => "Input Validation",
            VulnCategory::WeakRandomness => "Weak Randomness",
            VulnCategory::SandwichAttack => "Sandwich Attack",
            VulnCategory::RedundantStatements => "Redundant Statements",
            VulnCategory::FlashloanAttack => "Flashloan Attack",
            VulnCategory::TooManyDigits => "Too Many Digits",
            VulnCategory::ErrorMessage => "Error Message",
            VulnCategory::ConstantOptimization => "Constant Optimization",
            VulnCategory::ReturnValueCheck => "Return Value Check",
            VulnCategory::DivisionBeforeMultiplication => "Division before Multiplication",
        }
    }
}

impl fmt::Display for VulnCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown vulnerability category `{0}`")]
pub struct UnknownCategory(pub String);

impl FromStr for VulnCategory {
    type Err = UnknownCategory;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        VulnCategory::ALL
            .into_iter()
            .find(|c| c.id() == norm)
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryInfo {
    pub id: VulnCategory,
    pub display_name: String,
    pub description: String,
    /// Number of labeled instances of this category in the reference corpus.
    pub instance_count: u32,
}

/// Versioned category table shipped with the crate (`data/categories.json`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMetadata {
    pub version: u32,
    pub categories: Vec<CategoryInfo>,
}

#[derive(Debug, Error)]
pub enum MetadataError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed category metadata: {0}")]
    Json(#[from] serde_json::Error),
    #[error("category metadata must list each of the 13 categories exactly once: {0}")]
    Incomplete(String),
}

const BUNDLED: &str = include_str!("../../data/categories.json");

impl CategoryMetadata {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled category metadata is valid")
    }

    pub fn load(path: &Path) -> Result<Self, MetadataError> {
        let text = std::fs::read_to_string(path).map_err(|source| MetadataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, MetadataError> {
        let meta: CategoryMetadata = serde_json::from_str(text)?;
        for c in VulnCategory::ALL {
            let n = meta.categories.iter().filter(|i| i.id == c).count();
            if n != 1 {
                return Err(MetadataError::Incomplete(format!("`{c}` appears {n} times")));
            }
        }
        if meta.categories.len() != VulnCategory::ALL.len() {
            return Err(MetadataError::Incomplete(format!(
                "{} entries",
                meta.categories.len()
            )));
        }
        Ok(meta)
    }

    pub fn get(&self, category: VulnCategory) -> &CategoryInfo {
        self.categories
            .iter()
            .find(|c| c.id == category)
            .expect("validated on load")
    }

    pub fn total_instances(&self) -> u32 {
        self.categories.iter().map(|c| c.instance_count).sum()
    }
}
