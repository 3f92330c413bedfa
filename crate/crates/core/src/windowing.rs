//! Sliding windows over a time series. Window `n` (0-based) holds rows
//! `n*s .. n*s + w`; a trailing remainder shorter than `w` is dropped.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ClassLabel, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelRule {
    /// 1 if any step is labeled 1, else 0 (binary occupancy).
    #[default]
    AnyPositive,
    /// Modal label; ties go to the tied label seen earliest in the window.
    Majority,
}

impl std::str::FromStr for LabelRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "any_positive" | "any-positive" => Ok(LabelRule::AnyPositive),
            "majority" => Ok(LabelRule::Majority),
            other => Err(Error::InvalidConfig(format!(
                "unknown label rule `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    /// Points per window.
    pub w: usize,
    /// Stride in time steps.
    pub s: usize,
    #[serde(default)]
    pub label_rule: LabelRule,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            w: 10,
            s: 10,
            label_rule: LabelRule::AnyPositive,
        }
    }
}

impl WindowConfig {
    pub fn new(w: usize, s: usize, label_rule: LabelRule) -> Result<Self> {
        let cfg = Self { w, s, label_rule };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        // a single point has trivial persistence
        if self.w < 2 {
            return Err(Error::InvalidConfig(format!(
                "window length must be at least 2, got {}",
                self.w
            )));
        }
        if self.s < 1 {
            return Err(Error::InvalidConfig("stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of whole windows in a series of `len` rows.
    pub fn window_count(&self, len: usize) -> usize {
        if len < self.w {
            0
        } else {
            (len - self.w) / self.s + 1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledWindow {
    pub index: usize,
    pub points: Vec<Vec<f64>>,
    pub label: ClassLabel,
    /// First and last timestamps covered.
    pub time_range: (f64, f64),
}

impl LabeledWindow {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }
}

pub fn make_windows(series: &TimeSeries, cfg: &WindowConfig) -> Result<Vec<LabeledWindow>> {
    cfg.validate()?;
    if series.len() < cfg.w {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            window: cfg.w,
        });
    }
    let windows = (0..cfg.window_count(series.len()))
        .map(|n| {
            let rows = n * cfg.s..n * cfg.s + cfg.w;
            LabeledWindow {
                index: n,
                points: series.values()[rows.clone()].to_vec(),
                label: window_label(&series.labels()[rows.clone()], cfg.label_rule),
                time_range: (
                    series.timestamps()[rows.start],
                    series.timestamps()[rows.end - 1],
                ),
            }
        })
        .collect();
    Ok(windows)
}

/// Collapses the per-step labels of one window into a single label.
/// An empty slice yields 0.
pub fn window_label(labels: &[ClassLabel], rule: LabelRule) -> ClassLabel {
    match rule {
        LabelRule::AnyPositive => ClassLabel::from(labels.contains(&1)),
        LabelRule::Majority => {
            let mut counts: BTreeMap<ClassLabel, usize> = BTreeMap::new();
            for &l in labels {
                *counts.entry(l).or_default() += 1;
            }
            let best = counts.values().copied().max().unwrap_or(0);
            labels
                .iter()
                .copied()
                .find(|l| counts[l] == best)
                .unwrap_or(0)
        }
    }
}
