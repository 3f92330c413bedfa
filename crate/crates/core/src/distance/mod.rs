//! Wasserstein distances between persistence diagrams and the rectangular
//! test × train distance matrix fed to the classifier.

mod hungarian;
mod wasserstein;

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::sha256_hex;
use crate::persistence::{write_window_diagrams_csv, PersistenceDiagram, WindowDiagrams};

pub use hungarian::min_cost_assignment;
pub use wasserstein::{diagonal_distance, linf, wasserstein, WassersteinConfig};

/// Distances from every test diagram (rows) to every training diagram (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    /// Test window indices.
    pub rows: Vec<usize>,
    /// Training window indices.
    pub cols: Vec<usize>,
    pub values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// Writes `test_window,<train index>...` header then one row per test window.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header = std::iter::once("test_window".to_string())
            .chain(self.cols.iter().map(|c| c.to_string()));
        w.write_record(header).map_err(csv_err)?;
        for (idx, row) in self.rows.iter().zip(&self.values) {
            let record = std::iter::once(idx.to_string()).chain(row.iter().map(|v| v.to_string()));
            w.write_record(record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().from_reader(input);
        let headers = rdr.headers().map_err(csv_err)?.clone();
        let cols = headers
            .iter()
            .skip(1)
            .map(|h| {
                h.trim().parse().map_err(|_| Error::MalformedRow {
                    row: 1,
                    message: format!("invalid train window index `{h}`"),
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        let mut rows = Vec::new();
        let mut values = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(csv_err)?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let mut fields = record.iter();
            let idx = fields
                .next()
                .and_then(|f| f.trim().parse().ok())
                .ok_or_else(|| Error::MalformedRow {
                    row: line,
                    message: "invalid test window index".into(),
                })?;
            let row = fields
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite() && *v >= 0.0)
                        .ok_or_else(|| Error::MalformedRow {
                            row: line,
                            message: format!("invalid distance `{f}`"),
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != cols.len() {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: cols.len(),
                });
            }
            rows.push(idx);
            values.push(row);
        }
        Ok(Self { rows, cols, values })
    }
}

/// Metadata written next to a persisted matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub config: WassersteinConfig,
    pub test_diagrams_sha256: String,
    pub train_diagrams_sha256: String,
    pub n_test: usize,
    pub n_train: usize,
}

impl MatrixSidecar {
    pub fn new(test: &[WindowDiagrams], train: &[WindowDiagrams], cfg: &WassersteinConfig) -> Self {
        Self {
            config: *cfg,
            test_diagrams_sha256: diagram_set_hash(test),
            train_diagrams_sha256: diagram_set_hash(train),
            n_test: test.len(),
            n_train: train.len(),
        }
    }
}

/// SHA-256 of the long-format CSV serialization of a diagram set.
pub fn diagram_set_hash(sets: &[WindowDiagrams]) -> String {
    let mut buf = Vec::new();
    write_window_diagrams_csv(&mut buf, sets).expect("in-memory write");
    sha256_hex(&buf)
}

/// Computes only test × train entries. Rows are evaluated in parallel; every
/// entry is an independent pure computation so the result does not depend on
/// scheduling.
pub fn distance_matrix(
    test: &[WindowDiagrams],
    train: &[WindowDiagrams],
    cfg: &WassersteinConfig,
) -> Result<DistanceMatrix> {
    cfg.validate()?;
    if test.is_empty() {
        return Err(Error::EmptyDiagramSet("test"));
    }
    if train.is_empty() {
        return Err(Error::EmptyDiagramSet("train"));
    }
    let test_diagrams = select_dimension(test, cfg.dimension)?;
    let train_diagrams = select_dimension(train, cfg.dimension)?;
    let values = test_diagrams
        .par_iter()
        .map(|t| {
            train_diagrams
                .iter()
                .map(|r| wasserstein(t, r, cfg))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DistanceMatrix {
        rows: test.iter().map(|w| w.window).collect(),
        cols: train.iter().map(|w| w.window).collect(),
        values,
    })
}

fn select_dimension(sets: &[WindowDiagrams], dim: usize) -> Result<Vec<&PersistenceDiagram>> {
    sets.iter().map(|w| w.dimension(dim)).collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv {
        path: Default::default(),
        message: e.to_string(),
    }
}
