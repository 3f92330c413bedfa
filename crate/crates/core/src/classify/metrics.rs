use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ClassLabel;

/// An exact non-negative ratio of counts. `0/0` evaluates to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn value(&self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }

    /// Rounds half away from zero to `digits` decimals using integer arithmetic,
    /// so 181/200 becomes 0.91 rather than the binary neighbour of 0.905.
    pub fn round_half_up(&self, digits: u32) -> f64 {
        if self.den == 0 {
            return 0.0;
        }
        let scale = 10u128.pow(digits);
        let (num, den) = (self.num as u128, self.den as u128);
        let q = (2 * num * scale + den) / (2 * den);
        q as f64 / scale as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: ClassLabel,
    pub precision: f64,
    /// Recall of this class.
    pub recall: f64,
    pub f1: f64,
    /// Number of true members in the evaluated set.
    pub support: u64,
}

/// Confusion matrix and the metrics derived from it.
///
/// `confusion[i][j]` counts windows of true class `classes[i]` predicted as
/// `classes[j]`. Every metric is recomputable from the matrix alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub classes: Vec<ClassLabel>,
    pub confusion: Vec<Vec<u64>>,
    pub total: u64,
    pub accuracy: f64,
    /// Recall of class 1; binary tasks only.
    pub sensitivity: Option<f64>,
    /// Recall of class 0; binary tasks only.
    pub specificity: Option<f64>,
    pub per_class: Vec<ClassMetrics>,
}

pub fn evaluate(predictions: &[ClassLabel], truths: &[ClassLabel]) -> Result<EvaluationReport> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: truths.len(),
        });
    }
    if truths.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut classes: Vec<ClassLabel> = predictions.iter().chain(truths).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let slot: BTreeMap<ClassLabel, usize> =
        classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut confusion = vec![vec![0u64; classes.len()]; classes.len()];
    for (p, t) in predictions.iter().zip(truths) {
        confusion[slot[t]][slot[p]] += 1;
    }
    EvaluationReport::from_confusion(classes, confusion)
}

impl EvaluationReport {
    pub fn from_confusion(classes: Vec<ClassLabel>, confusion: Vec<Vec<u64>>) -> Result<Self> {
        let k = classes.len();
        if confusion.len() != k || confusion.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: confusion.len(),
            });
        }
        let total: u64 = confusion.iter().flatten().sum();
        if total == 0 {
            return Err(Error::EmptyInput);
        }
        let mut report = Self {
            classes,
            confusion,
            total,
            accuracy: 0.0,
            sensitivity: None,
            specificity: None,
            per_class: Vec::new(),
        };
        report.accuracy = report.accuracy_ratio().value();
        if report.is_binary() {
            report.sensitivity = report.recall_ratio(1).map(|r| checked(r, "sensitivity"));
            report.specificity = report.recall_ratio(0).map(|r| checked(r, "specificity"));
        }
        report.per_class = report
            .classes
            .iter()
            .map(|&label| ClassMetrics {
                label,
                precision: checked(report.precision_ratio(label).unwrap(), "precision"),
                recall: checked(report.recall_ratio(label).unwrap(), "recall"),
                f1: checked(report.f1_ratio(label).unwrap(), "F1"),
                support: report.confusion[report.slot(label).unwrap()].iter().sum(),
            })
            .collect();
        Ok(report)
    }

    /// All labels are 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.classes.iter().all(|&c| c == 0 || c == 1)
    }

    fn slot(&self, label: ClassLabel) -> Option<usize> {
        self.classes.iter().position(|&c| c == label)
    }

    fn true_positives(&self, label: ClassLabel) -> u64 {
        self.slot(label).map_or(0, |i| self.confusion[i][i])
    }

    fn predicted(&self, label: ClassLabel) -> u64 {
        self.slot(label)
            .map_or(0, |j| self.confusion.iter().map(|r| r[j]).sum())
    }

    fn actual(&self, label: ClassLabel) -> u64 {
        self.slot(label)
            .map_or(0, |i| self.confusion[i].iter().sum())
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.confusion[i][i]).sum()
    }

    pub fn accuracy_ratio(&self) -> Ratio {
        Ratio::new(self.trace(), self.total)
    }

    /// Recall of `label`; `None` for a binary task queried with a non-binary
    /// label, or a multiclass label not present.
    pub fn recall_ratio(&self, label: ClassLabel) -> Option<Ratio> {
        let known = self.slot(label).is_some() || (self.is_binary() && (label == 0 || label == 1));
        known.then(|| Ratio::new(self.true_positives(label), self.actual(label)))
    }

    pub fn precision_ratio(&self, label: ClassLabel) -> Option<Ratio> {
        let known = self.slot(label).is_some() || (self.is_binary() && (label == 0 || label == 1));
        known.then(|| Ratio::new(self.true_positives(label), self.predicted(label)))
    }

    /// `2TP / (2TP + FP + FN)`, equal to the harmonic mean of precision and recall.
    pub fn f1_ratio(&self, label: ClassLabel) -> Option<Ratio> {
        let known = self.slot(label).is_some() || (self.is_binary() && (label == 0 || label == 1));
        known.then(|| {
            let tp = self.true_positives(label);
            Ratio::new(2 * tp, self.predicted(label) + self.actual(label))
        })
    }

    pub fn sensitivity_ratio(&self) -> Option<Ratio> {
        if self.is_binary() {
            self.recall_ratio(1)
        } else {
            None
        }
    }

    pub fn specificity_ratio(&self) -> Option<Ratio> {
        if self.is_binary() {
            self.recall_ratio(0)
        } else {
            None
        }
    }

    pub fn class_metrics(&self, label: ClassLabel) -> Option<&ClassMetrics> {
        self.per_class.iter().find(|m| m.label == label)
    }
}

fn checked(r: Ratio, what: &str) -> f64 {
    if r.den == 0 {
        log::warn!("{what} is 0/0; reporting 0");
    }
    r.value()
}

/// Aligned text table with one line per named report: accuracy,
/// sensitivity, specificity, then precision and F1 per class.
pub fn render_table(rows: &[(String, &EvaluationReport)]) -> String {
    let mut classes: Vec<ClassLabel> = rows
        .iter()
        .flat_map(|(_, r)| r.classes.iter().copied())
        .collect();
    if rows.iter().all(|(_, r)| r.is_binary()) {
        classes.extend([0, 1]);
    }
    classes.sort_unstable();
    classes.dedup();

    let mut header = vec![
        String::new(),
        "Accuracy".into(),
        "Sensitivity".into(),
        "Specificity".into(),
    ];
    header.extend(classes.iter().map(|c| format!("Precision({c})")));
    header.extend(classes.iter().map(|c| format!("F1({c})")));

    let fmt = |r: Option<Ratio>| r.map_or("-".to_string(), |r| format!("{:.4}", r.value()));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(name, r)| {
            let mut line = vec![
                name.clone(),
                fmt(Some(r.accuracy_ratio())),
                fmt(r.sensitivity_ratio()),
                fmt(r.specificity_ratio()),
            ];
            line.extend(classes.iter().map(|&c| fmt(r.precision_ratio(c))));
            line.extend(classes.iter().map(|&c| fmt(r.f1_ratio(c))));
            line
        })
        .collect();

    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            std::iter::once(&header)
                .chain(&body)
                .map(|l| l[c].len())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for line in std::iter::once(&header).chain(&body) {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, w))| {
                if i == 0 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}
