// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::project::VulnCategory;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    pub fp: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fn_: u64, tn: u64, fp: u64) -> Self {
        ConfusionMatrix { tp, fn_, tn, fp }
    }

    /// Tally one verdict against its label.
    pub fn record(&mut self, positive_label: bool, flagged: bool) {
        match (positive_label, flagged) {
            (true, true) => self.tp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fp += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.tn + self.fp
    }
}

/// `None` marks a metric whose denominator is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub positive_recall: Option<f64>,
    pub negative_recall: Option<f64>,
    pub precision: Option<f64>,
    pub accuracy: Option<f64>,
}

impl Metrics {
    pub fn new(positive_recall: f64, negative_recall: f64, precision: f64, accuracy: f64) -> Self {
        Metrics {
            positive_recall: Some(positive_recall),
            negative_recall: Some(negative_recall),
            precision: Some(precision),
            accuracy: Some(accuracy),
        }
    }

    pub fn values(&self) -> [Option<f64>; 4] {
        [
            self.positive_recall,
            self.negative_recall,
            self.precision,
            self.accuracy,
        ]
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn compute_metrics(m: &ConfusionMatrix) -> Metrics {
    Metrics {
        positive_recall: ratio(m.tp, m.tp + m.fn_),
        negative_recall: ratio(m.tn, m.tn + m.fp),
        precision: ratio(m.tp, m.tp + m.fp),
        accuracy: ratio(m.tp + m.tn, m.total()),
    }
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Unweighted mean over the defined values.
pub fn mean_defined(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.into_iter().flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub markdown: String,
    pub json: Value,
    /// Macro average, rounded to two decimals.
    pub average: Metrics,
}

const HEADERS: [&str; 4] = ["Positive Recall", "Negative Recall", "Precision", "Accuracy"];

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{:.2}", round2(x)))
}

fn metrics_json(m: &Metrics) -> Value {
    json!({
        "positive_recall": m.positive_recall.map(round2),
        "negative_recall": m.negative_recall.map(round2),
        "precision": m.precision.map(round2),
        "accuracy": m.accuracy.map(round2),
    })
}

/// One row per category plus a macro-average row.
pub fn render_report(rows: &BTreeMap<VulnCategory, Metrics>) -> Report {
    let column = |i: usize| mean_defined(rows.values().map(|m| m.values()[i])).map(round2);
    let average = Metrics {
        positive_recall: column(0),
        negative_recall: column(1),
        precision: column(2),
        accuracy: column(3),
    };

    let mut md = String::new();
    writeln!(md, "| Vulnerability Type | {} |", HEADERS.join(" | ")).unwrap();
    writeln!(md, "|---|---:|---:|---:|---:|").unwrap();
    let mut categories = serde_json::Map::new();
    for (category, m) in rows {
        let cells: Vec<String> = m.values().into_iter().map(cell).collect();
        writeln!(md, "| {} | {} |", category.display_name(), cells.join(" | ")).unwrap();
        categories.insert(category.id().to_string(), metrics_json(m));
    }
    let cells: Vec<String> = average.values().into_iter().map(cell).collect();
    writeln!(md, "| **Average** | {} |", cells.join(" | ")).unwrap();

    Report {
        markdown: md,
        json: json!({ "categories": categories, "average": metrics_json(&average) }),
        average,
    }
}
