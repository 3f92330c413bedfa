//! Content-addressed stage artifacts under `<root>/<run_id>/<stage>/[<split>/]<hash>/`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Computed,
    Cached,
}

/// One executed stage: what it was keyed on and where its output lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageArtifact {
    pub stage: String,
    pub split: Option<String>,
    /// SHA-256 over the stage's inputs and configuration.
    pub hash: String,
    pub path: PathBuf,
    pub status: StageStatus,
    pub millis: f64,
}

pub(crate) struct ArtifactStore {
    run_dir: PathBuf,
    no_cache: bool,
}

impl ArtifactStore {
    pub(crate) fn new(run_dir: PathBuf, no_cache: bool) -> Self {
        Self { run_dir, no_cache }
    }

    pub(crate) fn run_dir(&self) -> &Path {
        &self.run_dir
    }

    /// Loads the artifact keyed by `hash` if present (and caching is on),
    /// otherwise computes it and writes it through `save`.
    pub(crate) fn stage<T>(
        &self,
        stage: &str,
        split: Option<&str>,
        hash: &str,
        load: impl FnOnce(&Path) -> Result<T>,
        compute: impl FnOnce() -> Result<T>,
        save: impl FnOnce(&T, &Path) -> Result<()>,
    ) -> Result<(T, StageArtifact)> {
        let label = match split {
            Some(s) => format!("{stage}/{s}"),
            None => stage.to_string(),
        };
        let wrap = |e: Error| e.in_stage(label.clone());
        let mut dir = self.run_dir.join(stage);
        if let Some(s) = split {
            dir.push(s);
        }
        let final_dir = dir.join(hash);
        let started = Instant::now();

        if !self.no_cache && final_dir.is_dir() {
            match load(&final_dir) {
                Ok(value) => {
                    log::info!("{label}: reusing {}", final_dir.display());
                    return Ok((
                        value,
                        StageArtifact {
                            stage: stage.to_string(),
                            split: split.map(str::to_string),
                            hash: hash.to_string(),
                            path: final_dir,
                            status: StageStatus::Cached,
                            millis: started.elapsed().as_secs_f64() * 1e3,
                        },
                    ));
                }
                Err(e) => log::warn!("{label}: cached artifact unreadable ({e}); recomputing"),
            }
        }

        let value = compute().map_err(wrap)?;
        let partial = dir.join(format!("{hash}.partial"));
        if partial.exists() {
            std::fs::remove_dir_all(&partial).map_err(|e| wrap(Error::io(&partial, e)))?;
        }
        std::fs::create_dir_all(&partial).map_err(|e| wrap(Error::io(&partial, e)))?;
        save(&value, &partial).map_err(wrap)?;
        if final_dir.exists() {
            std::fs::remove_dir_all(&final_dir).map_err(|e| wrap(Error::io(&final_dir, e)))?;
        }
        std::fs::rename(&partial, &final_dir).map_err(|e| wrap(Error::io(&final_dir, e)))?;
        log::info!("{label}: computed {}", final_dir.display());
        Ok((
            value,
            StageArtifact {
                stage: stage.to_string(),
                split: split.map(str::to_string),
                hash: hash.to_string(),
                path: final_dir,
                status: StageStatus::Computed,
                millis: started.elapsed().as_secs_f64() * 1e3,
            },
        ))
    }
}

pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = read_file(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::json(path, e))
}
