//! End-to-end runs: series → clouds → diagrams → distances → k-NN → report.
//!
//! Every stage is keyed by a SHA-256 over its inputs and configuration and
//! persisted under `<cache root>/<run_id>/<stage>/[<split>/]<hash>/`, so a
//! re-run only recomputes what changed. Changing `k` alone, for example,
//! reuses the distance matrices and redoes classification.
//!
//! Each evaluation split is its own experiment against the training split:
//! standardization is fitted per experiment (on train plus that split, or on
//! train only), then both periods are windowed and compared.

mod cache;
mod config;
pub mod synthetic;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::classify::{
    evaluate, predict_all, render_table, select_k, sweep_k, EvaluationReport, KnnConfig, SweepRow,
};
use crate::distance::{distance_matrix, DistanceMatrix, MatrixSidecar};
use crate::error::{Error, Result};
use crate::hashing::{canonical_json, hash_json, pretty_json, sha256_hex};
use crate::ingest::{
    apply_standardizer, fit_standardizer, read_csv, ClassLabel, StandardizationParams, TimeSeries,
};
use crate::persistence::{compute_diagrams, write_window_diagrams_csv, WindowDiagrams};
use crate::pointcloud::{augment, AugmentedCloud};
use crate::windowing::make_windows;

use cache::{read_file, read_json, write_file, ArtifactStore};
pub use cache::{StageArtifact, StageStatus};
pub use config::{AugmentSpec, ModelSelection, PipelineConfig};

/// Environment variable overriding the default cache root (`runs`).
pub const CACHE_ROOT_ENV: &str = "TOPOSERIES_CACHE_DIR";

/// Bumped whenever an artifact layout changes so stale caches are ignored.
const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub cache_root: PathBuf,
    /// Recompute every stage even when a matching artifact exists.
    pub no_cache: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            cache_root: default_cache_root(),
            no_cache: false,
        }
    }
}

pub fn default_cache_root() -> PathBuf {
    std::env::var_os(CACHE_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

/// One window as stored by the windowing stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub window: usize,
    pub label: ClassLabel,
    pub time_range: (f64, f64),
    pub cloud: AugmentedCloud,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSet {
    pub standardization: StandardizationParams,
    pub train: Vec<WindowRecord>,
    pub test: Vec<WindowRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramSet {
    pub train: Vec<WindowDiagrams>,
    pub test: Vec<WindowDiagrams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub split: String,
    pub sweep: Vec<SweepRow>,
    pub selected_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub split: String,
    pub k: usize,
    pub train_windows: usize,
    pub test_windows: usize,
    pub train_class_counts: BTreeMap<ClassLabel, usize>,
    pub test_class_counts: BTreeMap<ClassLabel, usize>,
    pub evaluation: EvaluationReport,
    pub test_window_indices: Vec<usize>,
    pub truths: Vec<ClassLabel>,
    pub predictions: Vec<ClassLabel>,
    pub sweep: Vec<SweepRow>,
}

/// The deterministic result of a run; contains no timings or paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run_id: String,
    pub train_split: String,
    pub model_selection: Option<SelectionReport>,
    pub experiments: Vec<ExperimentReport>,
}

impl RunReport {
    pub fn experiment(&self, split: &str) -> Option<&ExperimentReport> {
        self.experiments.iter().find(|e| e.split == split)
    }

    pub fn to_json(&self) -> String {
        pretty_json(self)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "run {}", self.run_id);
        if let Some(sel) = &self.model_selection {
            let _ = writeln!(out, "\nk selected on `{}`: {}", sel.split, sel.selected_k);
            out.push_str(&render_sweep(&sel.sweep));
        }
        let rows: Vec<(String, &EvaluationReport)> = self
            .experiments
            .iter()
            .map(|e| (format!("{} (k={})", e.split, e.k), &e.evaluation))
            .collect();
        let _ = writeln!(out);
        out.push_str(&render_table(&rows));
        for e in &self.experiments {
            let _ = writeln!(
                out,
                "\nconfusion `{}` (rows true, columns predicted {:?}):",
                e.split, e.evaluation.classes
            );
            for row in &e.evaluation.confusion {
                let cells: Vec<String> = row.iter().map(|c| format!("{c:>6}")).collect();
                let _ = writeln!(out, "{}", cells.join(""));
            }
            if !e.sweep.is_empty() {
                let _ = writeln!(out, "\nk sweep on `{}`:", e.split);
                out.push_str(&render_sweep(&e.sweep));
            }
        }
        out
    }
}

fn render_sweep(rows: &[SweepRow]) -> String {
    let pct = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{:.1}", 100.0 * v));
    let mut out = format!(
        "{:>6} {:>10} {:>12} {:>12}\n",
        "k", "accuracy%", "sensitivity%", "specificity%"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>6} {:>10} {:>12} {:>12}",
            r.k,
            pct(Some(r.accuracy)),
            pct(r.sensitivity),
            pct(r.specificity)
        );
    }
    out
}

/// Full configuration, data hash, and per-stage hashes, status and timings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub run_id: String,
    pub config: PipelineConfig,
    pub data: PathBuf,
    pub data_sha256: String,
    pub stages: Vec<StageArtifact>,
    pub report_sha256: String,
}

impl Provenance {
    pub fn stage(&self, stage: &str, split: Option<&str>) -> Option<&StageArtifact> {
        self.stages
            .iter()
            .find(|s| s.stage == stage && s.split.as_deref() == split)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub provenance: Provenance,
    pub run_dir: PathBuf,
}

impl RunOutcome {
    pub fn report_path(&self) -> PathBuf {
        self.run_dir.join("report.json")
    }
}

struct Experiment {
    split: String,
    windows_hash: String,
    distances_hash: String,
    train_labels: Vec<ClassLabel>,
    test_labels: Vec<ClassLabel>,
    test_indices: Vec<usize>,
    matrix: DistanceMatrix,
}

/// Runs every stage for `cfg` on the CSV at `data`, writing artifacts,
/// `report.json`, `report.txt` and `provenance.json` into the run directory.
pub fn run(cfg: &PipelineConfig, data: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    cfg.validate()?;
    let store = ArtifactStore::new(opts.cache_root.join(&cfg.run_id), opts.no_cache);
    let mut stages = Vec::new();

    let bytes = read_file(data).map_err(|e| e.in_stage("ingest"))?;
    let data_sha256 = sha256_hex(&bytes);
    let ingest_hash = hash_json(&json!({
        "version": ARTIFACT_VERSION,
        "data_sha256": data_sha256,
        "schema": cfg.schema,
    }));
    let (series, rec) = store.stage(
        "ingest",
        None,
        &ingest_hash,
        |dir| read_json::<TimeSeries>(&dir.join("series.json")),
        || read_csv(bytes.as_slice(), &cfg.schema),
        |s, dir| write_file(&dir.join("series.json"), canonical_json(s)),
    )?;
    stages.push(rec);

    let splits = cfg.split_spec()?;
    splits
        .check_bounds(series.len())
        .map_err(|e| e.in_stage("ingest"))?;
    let augment_cfg = cfg.augment.resolve(series.dim())?;
    let train_range = splits.get(&cfg.train_split)?.clone();

    let mut experiments = Vec::new();
    for split in cfg.evaluation_splits() {
        let test_range = splits.get(&split)?.clone();

        let windows_hash = hash_json(&json!({
            "version": ARTIFACT_VERSION,
            "ingest": ingest_hash,
            "train": train_range,
            "test": test_range,
            "standardization": cfg.standardization,
            "window": cfg.window,
            "augment": augment_cfg,
        }));
        let (windows, rec) = store.stage(
            "windows",
            Some(&split),
            &windows_hash,
            |dir| read_json::<WindowSet>(&dir.join("windows.json")),
            || {
                let sub = splits.select(&[&cfg.train_split, &split])?;
                let params =
                    fit_standardizer(&series, &sub, cfg.standardization, &cfg.train_split)?;
                let standardized = apply_standardizer(&series, &params)?;
                let records = |range: std::ops::Range<usize>| -> Result<Vec<WindowRecord>> {
                    make_windows(&standardized.slice(range)?, &cfg.window)?
                        .iter()
                        .map(|w| {
                            Ok(WindowRecord {
                                window: w.index,
                                label: w.label,
                                time_range: w.time_range,
                                cloud: augment(w, &augment_cfg)?,
                            })
                        })
                        .collect()
                };
                Ok(WindowSet {
                    train: records(train_range.rows())?,
                    test: records(test_range.rows())?,
                    standardization: params,
                })
            },
            |w, dir| write_file(&dir.join("windows.json"), canonical_json(w)),
        )?;
        stages.push(rec);

        let diagrams_hash = hash_json(&json!({
            "version": ARTIFACT_VERSION,
            "windows": windows_hash,
            "persistence": cfg.persistence,
        }));
        let (diagrams, rec) = store.stage(
            "diagrams",
            Some(&split),
            &diagrams_hash,
            |dir| read_json::<DiagramSet>(&dir.join("diagrams.json")),
            || {
                let run = |records: &[WindowRecord]| -> Result<Vec<WindowDiagrams>> {
                    records
                        .par_iter()
                        .map(|r| {
                            Ok(WindowDiagrams {
                                window: r.window,
                                diagrams: compute_diagrams(&r.cloud, &cfg.persistence)?,
                            })
                        })
                        .collect()
                };
                Ok(DiagramSet {
                    train: run(&windows.train)?,
                    test: run(&windows.test)?,
                })
            },
            |d, dir| {
                write_file(&dir.join("diagrams.json"), canonical_json(d))?;
                for (name, set) in [("train", &d.train), ("test", &d.test)] {
                    let mut buf = Vec::new();
                    write_window_diagrams_csv(&mut buf, set)?;
                    write_file(&dir.join(format!("{name}_diagrams.csv")), buf)?;
                }
                Ok(())
            },
        )?;
        stages.push(rec);

        let distances_hash = hash_json(&json!({
            "version": ARTIFACT_VERSION,
            "diagrams": diagrams_hash,
            "wasserstein": cfg.wasserstein,
        }));
        let (matrix, rec) = store.stage(
            "distances",
            Some(&split),
            &distances_hash,
            |dir| {
                let bytes = read_file(&dir.join("distances.csv"))?;
                DistanceMatrix::read_csv(bytes.as_slice())
            },
            || distance_matrix(&diagrams.test, &diagrams.train, &cfg.wasserstein),
            |m, dir| {
                let mut buf = Vec::new();
                m.write_csv(&mut buf)?;
                write_file(&dir.join("distances.csv"), buf)?;
                let sidecar = MatrixSidecar::new(&diagrams.test, &diagrams.train, &cfg.wasserstein);
                write_file(&dir.join("distances.json"), pretty_json(&sidecar))
            },
        )?;
        stages.push(rec);

        experiments.push(Experiment {
            split,
            windows_hash,
            distances_hash,
            train_labels: windows.train.iter().map(|w| w.label).collect(),
            test_labels: windows.test.iter().map(|w| w.label).collect(),
            test_indices: windows.test.iter().map(|w| w.window).collect(),
            matrix,
        });
    }

    let mut knn = cfg.knn;
    let model_selection = match &cfg.model_selection {
        Some(sel) => {
            let exp = experiments
                .iter()
                .find(|e| e.split == sel.split)
                .expect("selection split is evaluated");
            let sweep = sweep_k(
                &exp.matrix,
                &exp.train_labels,
                &exp.test_labels,
                &sel.candidates,
                knn.tie_break,
            )
            .map_err(|e| e.in_stage("model_selection"))?;
            knn.k = select_k(&sweep).expect("non-empty candidates");
            Some(SelectionReport {
                split: sel.split.clone(),
                sweep,
                selected_k: knn.k,
            })
        }
        None => None,
    };

    let mut reports = Vec::new();
    for exp in &experiments {
        if !cfg.test_splits.contains(&exp.split) {
            continue;
        }
        let classify_hash = hash_json(&json!({
            "version": ARTIFACT_VERSION,
            "windows": exp.windows_hash,
            "distances": exp.distances_hash,
            "knn": knn,
            "sweep_ks": cfg.sweep_ks,
        }));
        let (report, rec) = store.stage(
            "classify",
            Some(&exp.split),
            &classify_hash,
            |dir| read_json::<ExperimentReport>(&dir.join("experiment.json")),
            || classify_experiment(exp, &knn, &cfg.sweep_ks),
            |r, dir| write_file(&dir.join("experiment.json"), pretty_json(r)),
        )?;
        stages.push(rec);
        reports.push(report);
    }

    let report = RunReport {
        run_id: cfg.run_id.clone(),
        train_split: cfg.train_split.clone(),
        model_selection,
        experiments: reports,
    };
    let run_dir = store.run_dir().to_path_buf();
    let report_json = report.to_json();
    write_file(&run_dir.join("report.json"), &report_json)?;
    write_file(&run_dir.join("report.txt"), report.render_text())?;
    let provenance = Provenance {
        run_id: cfg.run_id.clone(),
        config: cfg.clone(),
        data: data.to_path_buf(),
        data_sha256,
        stages,
        report_sha256: sha256_hex(report_json.as_bytes()),
    };
    write_file(&run_dir.join("provenance.json"), pretty_json(&provenance))?;
    Ok(RunOutcome {
        report,
        provenance,
        run_dir,
    })
}

fn classify_experiment(
    exp: &Experiment,
    knn: &KnnConfig,
    sweep_ks: &[usize],
) -> Result<ExperimentReport> {
    let predictions = predict_all(&exp.matrix, &exp.train_labels, knn)?;
    let evaluation = evaluate(&predictions, &exp.test_labels)?;
    let sweep = sweep_k(
        &exp.matrix,
        &exp.train_labels,
        &exp.test_labels,
        sweep_ks,
        knn.tie_break,
    )?;
    let counts = |labels: &[ClassLabel]| {
        let mut m = BTreeMap::new();
        for &l in labels {
            *m.entry(l).or_insert(0) += 1;
        }
        m
    };
    Ok(ExperimentReport {
        split: exp.split.clone(),
        k: knn.k,
        train_windows: exp.train_labels.len(),
        test_windows: exp.test_labels.len(),
        train_class_counts: counts(&exp.train_labels),
        test_class_counts: counts(&exp.test_labels),
        evaluation,
        test_window_indices: exp.test_indices.clone(),
        truths: exp.test_labels.clone(),
        predictions,
        sweep,
    })
}

/// Reads the provenance record of a previous run.
pub fn describe_run(cache_root: &Path, run_id: &str) -> Result<Provenance> {
    let path = cache_root.join(run_id).join("provenance.json");
    if !path.is_file() {
        return Err(Error::UnknownRun(run_id.to_string()));
    }
    read_json(&path)
}
