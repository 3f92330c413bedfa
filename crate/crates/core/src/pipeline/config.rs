use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::KnnConfig;
use crate::distance::WassersteinConfig;
use crate::error::{Error, Result};
use crate::ingest::{CsvSchema, SplitRange, SplitSpec, StandardizationMode};
use crate::persistence::PersistenceConfig;
use crate::pointcloud::{AnchorSpec, AugmentConfig, OffsetSpec};
use crate::windowing::WindowConfig;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AugmentSpec {
    #[serde(default)]
    pub offset: OffsetSpec,
    #[serde(default)]
    pub anchors: AnchorSpec,
}

impl AugmentSpec {
    pub fn resolve(&self, d: usize) -> Result<AugmentConfig> {
        AugmentConfig::new(self.offset.resolve(d)?, self.anchors.resolve(d)?)
    }
}

/// Choose `k` on one split by accuracy, then use it everywhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSelection {
    pub split: String,
    pub candidates: Vec<usize>,
}

/// Everything needed to run the pipeline on one data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub run_id: String,
    /// Data file; relative paths resolve against the config file's directory.
    #[serde(default)]
    pub data: Option<PathBuf>,
    pub schema: CsvSchema,
    pub splits: Vec<SplitRange>,
    pub train_split: String,
    pub test_splits: Vec<String>,
    #[serde(default)]
    pub standardization: StandardizationMode,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub augment: AugmentSpec,
    #[serde(default)]
    pub persistence: PersistenceConfig,
    #[serde(default)]
    pub wasserstein: WassersteinConfig,
    #[serde(default)]
    pub knn: KnnConfig,
    #[serde(default)]
    pub model_selection: Option<ModelSelection>,
    /// Extra k values evaluated on every split for reporting.
    #[serde(default)]
    pub sweep_ks: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl PipelineConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        if let (Some(data), Some(dir)) = (&cfg.data, path.parent()) {
            if data.is_relative() {
                cfg.data = Some(dir.join(data));
            }
        }
        Ok(cfg)
    }

    pub fn split_spec(&self) -> Result<SplitSpec> {
        SplitSpec::new(self.splits.clone())
    }

    /// Splits to evaluate against the training split: the model-selection
    /// split first, then the test splits, without repeats.
    pub fn evaluation_splits(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let selection = self.model_selection.as_ref().map(|m| m.split.clone());
        for name in selection
            .into_iter()
            .chain(self.test_splits.iter().cloned())
        {
            if !out.contains(&name) {
                out.push(name);
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.run_id.is_empty()
            || !self
                .run_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
            || self.run_id.starts_with('.')
        {
            return Err(Error::InvalidConfig(format!(
                "run_id `{}` must be non-empty and use only [A-Za-z0-9._-]",
                self.run_id
            )));
        }
        let spec = self.split_spec()?;
        spec.get(&self.train_split)?;
        if self.test_splits.is_empty() {
            return Err(Error::InvalidConfig("no test splits given".into()));
        }
        for name in self.evaluation_splits() {
            spec.get(&name)?;
            if name == self.train_split {
                return Err(Error::InvalidConfig(format!(
                    "`{name}` is both the training split and an evaluation split"
                )));
            }
        }
        self.window.validate()?;
        self.persistence.validate()?;
        self.wasserstein.validate()?;
        if self.wasserstein.dimension > self.persistence.max_dimension {
            return Err(Error::InvalidConfig(format!(
                "distances use dimension {} but persistence stops at {}",
                self.wasserstein.dimension, self.persistence.max_dimension
            )));
        }
        if self.knn.k == 0 {
            return Err(Error::InvalidConfig("k must be positive".into()));
        }
        if let Some(sel) = &self.model_selection {
            if sel.candidates.is_empty() || sel.candidates.contains(&0) {
                return Err(Error::InvalidConfig(
                    "model selection needs positive candidate k values".into(),
                ));
            }
        }
        if self.sweep_ks.contains(&0) {
            return Err(Error::InvalidConfig(
                "sweep k values must be positive".into(),
            ));
        }
        self.augment.resolve(self.schema.features.len())?;
        Ok(())
    }
}
