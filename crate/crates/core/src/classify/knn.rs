use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ClassLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Among the tied classes, the one of the closest neighbor.
    #[default]
    NearestNeighborLabel,
    LowestClassId,
}

impl std::str::FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest_neighbor_label" | "nearest" => Ok(TieBreak::NearestNeighborLabel),
            "lowest_class_id" | "lowest" => Ok(TieBreak::LowestClassId),
            other => Err(Error::InvalidConfig(format!(
                "unknown tie-break rule `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    #[serde(default)]
    pub tie_break: TieBreak,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: 50,
            tie_break: TieBreak::NearestNeighborLabel,
        }
    }
}

impl KnnConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            tie_break: TieBreak::default(),
        }
    }

    pub fn validate(&self, n_train: usize) -> Result<()> {
        if self.k == 0 || self.k > n_train {
            return Err(Error::InvalidK {
                k: self.k,
                train: n_train,
            });
        }
        Ok(())
    }
}

/// Indices of the `k` smallest distances; equal distances favor the lower index.
pub fn nearest_neighbors(row: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Majority vote among the `k` nearest training windows.
pub fn knn_predict(
    row: &[f64],
    train_labels: &[ClassLabel],
    cfg: &KnnConfig,
) -> Result<ClassLabel> {
    if row.len() != train_labels.len() {
        return Err(Error::LengthMismatch {
            left: row.len(),
            right: train_labels.len(),
        });
    }
    cfg.validate(train_labels.len())?;
    let neighbors = nearest_neighbors(row, cfg.k);
    let mut votes: BTreeMap<ClassLabel, usize> = BTreeMap::new();
    for &i in &neighbors {
        *votes.entry(train_labels[i]).or_default() += 1;
    }
    let best = votes.values().copied().max().unwrap_or(0);
    let label = match cfg.tie_break {
        TieBreak::NearestNeighborLabel => neighbors
            .iter()
            .map(|&i| train_labels[i])
            .find(|l| votes[l] == best),
        TieBreak::LowestClassId => votes.iter().find(|(_, &c)| c == best).map(|(&l, _)| l),
    };
    Ok(label.expect("k >= 1 neighbors"))
}
