//! k-nearest-neighbor classification over a precomputed distance matrix and
//! the evaluation metrics reported for it.

mod knn;
mod metrics;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::ingest::ClassLabel;

pub use knn::{knn_predict, nearest_neighbors, KnnConfig, TieBreak};
pub use metrics::{evaluate, render_table, ClassMetrics, EvaluationReport, Ratio};

/// Predicts a label for every row of `matrix`.
pub fn predict_all(
    matrix: &DistanceMatrix,
    train_labels: &[ClassLabel],
    cfg: &KnnConfig,
) -> Result<Vec<ClassLabel>> {
    if matrix.n_cols() != train_labels.len() {
        return Err(Error::LengthMismatch {
            left: matrix.n_cols(),
            right: train_labels.len(),
        });
    }
    matrix
        .values
        .iter()
        .map(|row| knn_predict(row, train_labels, cfg))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

/// One evaluation per `k`, all from the same matrix.
pub fn sweep_k(
    matrix: &DistanceMatrix,
    train_labels: &[ClassLabel],
    test_labels: &[ClassLabel],
    ks: &[usize],
    tie_break: TieBreak,
) -> Result<Vec<SweepRow>> {
    if matrix.n_rows() != test_labels.len() {
        return Err(Error::LengthMismatch {
            left: matrix.n_rows(),
            right: test_labels.len(),
        });
    }
    // reject any bad k before doing work
    for &k in ks {
        KnnConfig { k, tie_break }.validate(train_labels.len())?;
    }
    ks.iter()
        .map(|&k| {
            let predictions = predict_all(matrix, train_labels, &KnnConfig { k, tie_break })?;
            let report = evaluate(&predictions, test_labels)?;
            Ok(SweepRow {
                k,
                accuracy: report.accuracy,
                sensitivity: report.sensitivity,
                specificity: report.specificity,
            })
        })
        .collect()
}

/// Highest accuracy wins; ties go to the smaller `k`.
pub fn select_k(rows: &[SweepRow]) -> Option<usize> {
    rows.iter()
        .fold(None::<&SweepRow>, |best, r| match best {
            Some(b) if b.accuracy > r.accuracy || (b.accuracy == r.accuracy && b.k <= r.k) => {
                Some(b)
            }
            _ => Some(r),
        })
        .map(|r| r.k)
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Csv {
        path: Default::default(),
        message: e.to_string(),
    };
    w.write_record(["k", "accuracy", "sensitivity", "specificity"])
        .map_err(err)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.accuracy.to_string(),
            opt(r.sensitivity),
            opt(r.specificity),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}
