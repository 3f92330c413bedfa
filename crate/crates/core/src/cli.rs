//! Command-line interface. Every stage is exposed as its own command reading
//! and writing files; `run` executes the cached end-to-end pipeline.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 numerical error.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::classify::{
    evaluate, predict_all, render_table, sweep_k, write_sweep_csv, KnnConfig, TieBreak,
};
use crate::distance::{distance_matrix, DistanceMatrix, MatrixSidecar, WassersteinConfig};
use crate::error::{Error, ErrorCategory, Result};
use crate::hashing::pretty_json;
use crate::ingest::{
    apply_standardizer, fit_standardizer, load_csv, ClassLabel, CsvSchema, SplitRange, SplitSpec,
    StandardizationMode, TimeSeries,
};
use crate::persistence::{
    compute_diagrams, read_window_diagrams_csv, write_diagram_csv, write_window_diagrams_csv,
    EssentialPolicy, PersistenceConfig, WindowDiagrams,
};
use crate::pipeline::{self, synthetic::SyntheticSpec, PipelineConfig, RunOptions};
use crate::plot::diagram_svg;
use crate::pointcloud::{augment, AnchorSpec, AugmentedCloud, OffsetSpec};
use crate::windowing::{make_windows, LabelRule, WindowConfig};

// Writes to stdout, ignoring errors such as a closed pipe (`| head`).
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}
macro_rules! outp {
    ($($t:tt)*) => {{
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Debug, Parser)]
#[command(
    name = "toposeries",
    version,
    about = "Topological k-NN classification of multivariate time-series windows",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load a CSV, split it and write standardized per-split CSVs.
    Ingest(IngestArgs),
    /// Cut a (standardized) series into windows and augmented point clouds.
    Windows(WindowsArgs),
    /// Compute persistence diagrams of point clouds.
    Diagrams(DiagramsArgs),
    /// Wasserstein distance matrix between test and train diagram sets.
    Distmat(DistmatArgs),
    /// k-NN classification from a distance matrix.
    Classify(ClassifyArgs),
    /// Evaluate several k on one distance matrix.
    SweepK(SweepArgs),
    /// Run the cached end-to-end pipeline from a JSON config.
    Run(RunArgs),
    /// Show the provenance record of a previous run.
    Describe(DescribeArgs),
    /// Plot a persistence diagram as SVG (plus a CSV twin).
    PlotDiagram(PlotArgs),
    /// Generate the seeded two-class synthetic data set.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct SchemaArgs {
    /// Pipeline config to take the CSV schema from.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    timestamp: Option<String>,
    /// Comma-separated feature columns.
    #[arg(long, value_delimiter = ',')]
    features: Vec<String>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    delimiter: Option<char>,
}

impl SchemaArgs {
    fn resolve(&self) -> Result<CsvSchema> {
        let mut schema = match &self.config {
            Some(path) => PipelineConfig::from_json_file(path)?.schema,
            None => CsvSchema {
                timestamp: String::new(),
                features: Vec::new(),
                label: String::new(),
                delimiter: ',',
            },
        };
        if let Some(t) = &self.timestamp {
            schema.timestamp = t.clone();
        }
        if !self.features.is_empty() {
            schema.features = self.features.clone();
        }
        if let Some(l) = &self.label {
            schema.label = l.clone();
        }
        if let Some(d) = self.delimiter {
            schema.delimiter = d;
        }
        if schema.timestamp.is_empty() || schema.label.is_empty() {
            return Err(Error::InvalidConfig(
                "schema needs --timestamp and --label (or --config)".into(),
            ));
        }
        if schema.features.is_empty() {
            return Err(Error::NoFeatures);
        }
        Ok(schema)
    }
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    schema: SchemaArgs,
    /// NAME:START:END row range (end exclusive); repeatable. Defaults to one split `all`.
    #[arg(long = "split", value_parser = parse_split)]
    splits: Vec<SplitRange>,
    /// Split(s) used to fit the standardization; defaults to all splits.
    #[arg(long = "fit-on", value_delimiter = ',')]
    fit_on: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CloudArgs {
    #[arg(long, short = 'w', default_value_t = 10)]
    window: usize,
    #[arg(long, short = 's', default_value_t = 10)]
    stride: usize,
    #[arg(long, default_value = "any_positive")]
    label_rule: LabelRule,
    /// `auto` or a comma list.
    #[arg(long, default_value = "auto")]
    offset: String,
    /// `origin`, `none`, or a comma list; repeat for several anchors.
    #[arg(long = "anchor")]
    anchors: Vec<String>,
}

#[derive(Debug, Args)]
struct WindowsArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    cloud: CloudArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DiagramsArgs {
    /// clouds.csv written by `windows`.
    #[arg(long)]
    clouds: PathBuf,
    /// Highest homology dimension (0 or 1).
    #[arg(long, default_value_t = 0)]
    dimension: usize,
    #[arg(long)]
    maxscale: Option<f64>,
    /// `dropped` or `capped` (requires --maxscale).
    #[arg(long, default_value = "dropped")]
    essential: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DistmatArgs {
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    train: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    dimension: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct LabelArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// labels.csv (window,label) of the training windows.
    #[arg(long)]
    train_labels: PathBuf,
    #[arg(long)]
    test_labels: PathBuf,
    #[arg(long, default_value = "nearest_neighbor_label")]
    tie_break: TieBreak,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    labels: LabelArgs,
    #[arg(long, short = 'k', default_value_t = 50)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    labels: LabelArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Data file; overrides the config's `data`.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, short = 'w')]
    window: Option<usize>,
    #[arg(long, short = 's')]
    stride: Option<usize>,
    #[arg(long)]
    label_rule: Option<LabelRule>,
    #[arg(long)]
    offset: Option<String>,
    #[arg(long = "anchor")]
    anchors: Vec<String>,
    /// Homology dimension compared by the distances.
    #[arg(long)]
    dimension: Option<usize>,
    #[arg(long)]
    maxscale: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, short = 'k')]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    run_id: Option<String>,
    /// Recompute every stage.
    #[arg(long)]
    no_cache: bool,
    /// After the run, recompute everything without the cache and compare bytes.
    #[arg(long)]
    verify_cache: bool,
    /// Cache root (default: $TOPOSERIES_CACHE_DIR or ./runs).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DescribeArgs {
    #[arg(long)]
    run_id: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    diagram: PathBuf,
    /// Window to plot from a long-format file; defaults to the first.
    #[arg(long = "window")]
    window: Option<usize>,
    #[arg(long)]
    title: Option<String>,
    /// SVG output; the CSV twin is written next to it with a `.csv` extension.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    windows: usize,
    #[arg(long, short = 'w', default_value_t = 10)]
    window: usize,
    #[arg(long, default_value_t = 3)]
    channels: usize,
    /// CSV output.
    #[arg(long)]
    out: PathBuf,
    /// Also write a matching pipeline config here.
    #[arg(long)]
    config_out: Option<PathBuf>,
}

fn parse_split(text: &str) -> std::result::Result<SplitRange, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [name, start, end] => {
            let start = start
                .parse()
                .map_err(|_| format!("bad start in `{text}`"))?;
            let end = end.parse().map_err(|_| format!("bad end in `{text}`"))?;
            Ok(SplitRange::new(name, start, end))
        }
        _ => Err(format!("expected NAME:START:END, got `{text}`")),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => ErrorCategory::Usage.exit_code(),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let category = e.category();
            let message = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {message}", category.as_str());
            category.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Windows(a) => windows(a),
        Command::Diagrams(a) => diagrams(a),
        Command::Distmat(a) => distmat(a),
        Command::Classify(a) => classify(a),
        Command::SweepK(a) => sweep(a),
        Command::Run(a) => run(a),
        Command::Describe(a) => describe(a),
        Command::PlotDiagram(a) => plot(a),
        Command::Synth(a) => synth(a),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn series_csv(series: &TimeSeries, schema: &CsvSchema) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = csv_error(Path::new("<csv>"));
    let header = std::iter::once(schema.timestamp.clone())
        .chain(schema.features.iter().cloned())
        .chain(std::iter::once(schema.label.clone()));
    w.write_record(header).map_err(&err)?;
    for ((t, row), label) in series
        .timestamps()
        .iter()
        .zip(series.values())
        .zip(series.labels())
    {
        let record = std::iter::once(t.to_string())
            .chain(row.iter().map(|v| v.to_string()))
            .chain(std::iter::once(label.to_string()));
        w.write_record(record).map_err(&err)?;
    }
    w.into_inner()
        .map_err(|e| Error::io("<csv>", e.into_error()))
}

fn ingest(a: IngestArgs) -> Result<()> {
    let mut schema = a.schema.resolve()?;
    let series = load_csv(&a.data, &schema)?;
    let splits = if a.splits.is_empty() {
        SplitSpec::whole("all", series.len())?
    } else {
        SplitSpec::new(a.splits.clone())?
    };
    splits.check_bounds(series.len())?;
    let fit_names: Vec<String> = if a.fit_on.is_empty() {
        splits.ranges().iter().map(|r| r.name.clone()).collect()
    } else {
        a.fit_on.clone()
    };
    let fit_refs: Vec<&str> = fit_names.iter().map(String::as_str).collect();
    let fit_spec = splits.select(&fit_refs)?;
    let params = fit_standardizer(
        &series,
        &fit_spec,
        StandardizationMode::FitOnCombined,
        fit_refs[0],
    )?;
    let standardized = apply_standardizer(&series, &params)?;
    create_dir(&a.out)?;
    schema.delimiter = ',';
    for r in splits.ranges() {
        let part = standardized.slice(r.rows())?;
        write(
            &a.out.join(format!("{}.csv", r.name)),
            series_csv(&part, &schema)?,
        )?;
    }
    write(&a.out.join("standardization.json"), pretty_json(&params))?;
    out!(
        "ingested {} rows x {} channels into {} split(s) under {}",
        series.len(),
        series.dim(),
        splits.ranges().len(),
        a.out.display()
    );
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct LabelRow {
    window: usize,
    label: ClassLabel,
}

fn windows(a: WindowsArgs) -> Result<()> {
    let schema = a.schema.resolve()?;
    let series = load_csv(&a.input, &schema)?;
    let cfg = WindowConfig::new(a.cloud.window, a.cloud.stride, a.cloud.label_rule)?;
    let d = series.dim();
    let anchors = if a.cloud.anchors.is_empty() {
        AnchorSpec::default()
    } else {
        AnchorSpec::parse(&a.cloud.anchors)?
    };
    let augment_cfg = crate::pipeline::AugmentSpec {
        offset: OffsetSpec::parse(&a.cloud.offset)?,
        anchors,
    }
    .resolve(d)?;

    let windows = make_windows(&series, &cfg)?;
    create_dir(&a.out)?;
    let clouds_path = a.out.join("clouds.csv");
    let mut clouds = csv::Writer::from_writer(Vec::new());
    let err = csv_error(&clouds_path);
    let header = ["window", "label", "kind"]
        .into_iter()
        .map(String::from)
        .chain((0..d).map(|c| format!("x{c}")));
    clouds.write_record(header).map_err(&err)?;
    let labels_path = a.out.join("labels.csv");
    let mut labels = csv::Writer::from_writer(Vec::new());
    for w in &windows {
        let cloud = augment(w, &augment_cfg)?;
        for (i, p) in cloud.points.iter().enumerate() {
            let kind = if i < cloud.translated {
                "point"
            } else {
                "anchor"
            };
            let record = [w.index.to_string(), w.label.to_string(), kind.to_string()]
                .into_iter()
                .chain(p.iter().map(|v| v.to_string()));
            clouds.write_record(record).map_err(&err)?;
        }
        labels
            .serialize(LabelRow {
                window: w.index,
                label: w.label,
            })
            .map_err(csv_error(&labels_path))?;
    }
    write(
        &clouds_path,
        clouds
            .into_inner()
            .map_err(|e| Error::io(&clouds_path, e.into_error()))?,
    )?;
    write(
        &labels_path,
        labels
            .into_inner()
            .map_err(|e| Error::io(&labels_path, e.into_error()))?,
    )?;
    out!("{} windows written to {}", windows.len(), a.out.display());
    Ok(())
}

fn read_clouds(path: &Path) -> Result<Vec<AugmentedCloud>> {
    let bytes = read(path)?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let err = csv_error(path);
    let mut clouds: Vec<AugmentedCloud> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(&err)?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let bad = |m: &str| Error::MalformedRow {
            row,
            message: m.to_string(),
        };
        let window: usize = record
            .get(0)
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| bad("invalid window index"))?;
        let kind = record.get(2).ok_or_else(|| bad("missing kind"))?;
        let point = record
            .iter()
            .skip(3)
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| bad(&format!("invalid coordinate `{f}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if clouds.last().is_none_or(|c| c.source_window != window) {
            clouds.push(AugmentedCloud {
                points: Vec::new(),
                source_window: window,
                translated: 0,
            });
        }
        let cloud = clouds.last_mut().expect("pushed above");
        if kind == "point" {
            cloud.translated += 1;
        }
        cloud.points.push(point);
    }
    Ok(clouds)
}

fn diagrams(a: DiagramsArgs) -> Result<()> {
    let essential =
        match a.essential.as_str() {
            "dropped" => EssentialPolicy::Dropped,
            "capped" => EssentialPolicy::Capped(a.maxscale.ok_or_else(|| {
                Error::InvalidConfig("--essential capped needs --maxscale".into())
            })?),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown essential policy `{other}`"
                )))
            }
        };
    let cfg = PersistenceConfig {
        max_dimension: a.dimension,
        essential,
        maxscale: a.maxscale,
    };
    cfg.validate()?;
    let clouds = read_clouds(&a.clouds)?;
    use rayon::prelude::*;
    let sets = clouds
        .par_iter()
        .map(|c| {
            Ok(WindowDiagrams {
                window: c.source_window,
                diagrams: compute_diagrams(c, &cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    write_window_diagrams_csv(&mut buf, &sets)?;
    write(&a.out, buf)?;
    out!("{} diagrams written to {}", sets.len(), a.out.display());
    Ok(())
}

fn read_diagrams(path: &Path) -> Result<Vec<WindowDiagrams>> {
    read_window_diagrams_csv(read(path)?.as_slice()).map_err(|e| with_path(e, path))
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Csv { message, .. } => Error::Csv {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    }
}

fn distmat(a: DistmatArgs) -> Result<()> {
    let cfg = WassersteinConfig {
        p: a.p,
        dimension: a.dimension,
    };
    let test = read_diagrams(&a.test)?;
    let train = read_diagrams(&a.train)?;
    let matrix = distance_matrix(&test, &train, &cfg)?;
    let mut buf = Vec::new();
    matrix.write_csv(&mut buf)?;
    write(&a.out, buf)?;
    write(
        &a.out.with_extension("json"),
        pretty_json(&MatrixSidecar::new(&test, &train, &cfg)),
    )?;
    out!(
        "{} x {} distances written to {}",
        matrix.n_rows(),
        matrix.n_cols(),
        a.out.display()
    );
    Ok(())
}

fn read_labels(path: &Path) -> Result<Vec<LabelRow>> {
    let bytes = read(path)?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    rdr.deserialize()
        .collect::<std::result::Result<Vec<LabelRow>, _>>()
        .map_err(csv_error(path))
}

/// Labels aligned with the matrix's row or column window indices.
fn aligned_labels(indices: &[usize], path: &Path) -> Result<Vec<ClassLabel>> {
    let rows = read_labels(path)?;
    indices
        .iter()
        .map(|i| {
            rows.iter()
                .find(|r| r.window == *i)
                .map(|r| r.label)
                .ok_or_else(|| Error::Csv {
                    path: path.to_path_buf(),
                    message: format!("no label for window {i}"),
                })
        })
        .collect()
}

fn load_labeled_matrix(
    a: &LabelArgs,
) -> Result<(DistanceMatrix, Vec<ClassLabel>, Vec<ClassLabel>)> {
    let matrix = DistanceMatrix::read_csv(read(&a.matrix)?.as_slice())
        .map_err(|e| with_path(e, &a.matrix))?;
    let train = aligned_labels(&matrix.cols, &a.train_labels)?;
    let test = aligned_labels(&matrix.rows, &a.test_labels)?;
    Ok((matrix, train, test))
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let (matrix, train, test) = load_labeled_matrix(&a.labels)?;
    let cfg = KnnConfig {
        k: a.k,
        tie_break: a.labels.tie_break,
    };
    let predictions = predict_all(&matrix, &train, &cfg)?;
    let report = evaluate(&predictions, &test)?;
    if let Some(out) = &a.out {
        write(out, pretty_json(&report))?;
    }
    outp!("{}", render_table(&[(format!("k={}", a.k), &report)]));
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let (matrix, train, test) = load_labeled_matrix(&a.labels)?;
    let rows = sweep_k(&matrix, &train, &test, &a.ks, a.labels.tie_break)?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows)?;
    if let Some(out) = &a.out {
        write(out, &buf)?;
    }
    let _ = std::io::stdout().write_all(&buf);
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    let mut cfg = PipelineConfig::from_json_file(&a.config)?;
    if let Some(w) = a.window {
        cfg.window.w = w;
    }
    if let Some(s) = a.stride {
        cfg.window.s = s;
    }
    if let Some(rule) = a.label_rule {
        cfg.window.label_rule = rule;
    }
    if let Some(offset) = &a.offset {
        cfg.augment.offset = OffsetSpec::parse(offset)?;
    }
    if !a.anchors.is_empty() {
        cfg.augment.anchors = AnchorSpec::parse(&a.anchors)?;
    }
    if let Some(dim) = a.dimension {
        cfg.wasserstein.dimension = dim;
        cfg.persistence.max_dimension = cfg.persistence.max_dimension.max(dim);
    }
    if let Some(m) = a.maxscale {
        cfg.persistence.maxscale = Some(m);
    }
    if let Some(p) = a.p {
        cfg.wasserstein.p = p;
    }
    if let Some(k) = a.k {
        cfg.knn.k = k;
        cfg.model_selection = None;
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(id) = a.run_id {
        cfg.run_id = id;
    }
    let data =
        a.data.clone().or_else(|| cfg.data.clone()).ok_or_else(|| {
            Error::InvalidConfig("no data file (set `data` or pass --data)".into())
        })?;
    let opts = RunOptions {
        cache_root: a.out.clone().unwrap_or_else(pipeline::default_cache_root),
        no_cache: a.no_cache,
    };
    let outcome = pipeline::run(&cfg, &data, &opts)?;
    outp!("{}", outcome.report.render_text());
    for s in &outcome.provenance.stages {
        log::info!(
            "{}{} {:?} {:.1} ms",
            s.stage,
            s.split
                .as_deref()
                .map(|x| format!("/{x}"))
                .unwrap_or_default(),
            s.status,
            s.millis
        );
    }
    out!("\nreport: {}", outcome.report_path().display());

    if a.verify_cache {
        let scratch = tempfile_dir()?;
        let fresh = pipeline::run(
            &cfg,
            &data,
            &RunOptions {
                cache_root: scratch.clone(),
                no_cache: true,
            },
        )?;
        let mismatches = compare_runs(&outcome, &fresh)?;
        let _ = std::fs::remove_dir_all(&scratch);
        if !mismatches.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "cache verification failed for: {}",
                mismatches.join(", ")
            )));
        }
        out!("cache verification: all stage artifacts and the report are byte-identical");
    }
    Ok(())
}

fn tempfile_dir() -> Result<PathBuf> {
    let dir = std::env::temp_dir().join(format!("toposeries-verify-{}", std::process::id()));
    create_dir(&dir)?;
    Ok(dir)
}

/// Names of stage artifacts (or the report) whose bytes differ between runs.
pub fn compare_runs(a: &pipeline::RunOutcome, b: &pipeline::RunOutcome) -> Result<Vec<String>> {
    let mut out = Vec::new();
    if read(&a.report_path())? != read(&b.report_path())? {
        out.push("report.json".to_string());
    }
    for (sa, sb) in a.provenance.stages.iter().zip(&b.provenance.stages) {
        let name = format!(
            "{}{}",
            sa.stage,
            sa.split
                .as_deref()
                .map(|x| format!("/{x}"))
                .unwrap_or_default()
        );
        if sa.hash != sb.hash || dir_bytes(&sa.path)? != dir_bytes(&sb.path)? {
            out.push(name);
        }
    }
    if a.provenance.stages.len() != b.provenance.stages.len() {
        out.push("stage list".into());
    }
    Ok(out)
}

fn dir_bytes(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .collect();
    entries.sort();
    entries
        .into_iter()
        .map(|p| {
            let name = p
                .file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            Ok((name, read(&p)?))
        })
        .collect()
}

fn describe(a: DescribeArgs) -> Result<()> {
    let root = a.out.unwrap_or_else(pipeline::default_cache_root);
    let prov = pipeline::describe_run(&root, &a.run_id)?;
    outp!("{}", pretty_json(&prov));
    Ok(())
}

fn plot(a: PlotArgs) -> Result<()> {
    let sets = read_diagrams(&a.diagram)?;
    let set = match a.window {
        Some(w) => sets
            .into_iter()
            .find(|s| s.window == w)
            .ok_or_else(|| Error::Csv {
                path: a.diagram.clone(),
                message: format!("no rows for window {w}"),
            })?,
        None => sets.into_iter().next().unwrap_or(WindowDiagrams {
            window: 0,
            diagrams: vec![crate::persistence::PersistenceDiagram::empty(0)],
        }),
    };
    let title = a
        .title
        .clone()
        .unwrap_or_else(|| format!("window {}", set.window));
    write(&a.out, diagram_svg(&set.diagrams, &title))?;
    let mut buf = Vec::new();
    write_diagram_csv(&mut buf, &set.diagrams)?;
    let twin = a.out.with_extension("csv");
    write(&twin, buf)?;
    out!("wrote {} and {}", a.out.display(), twin.display());
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let spec = SyntheticSpec {
        seed: a.seed,
        windows: a.windows,
        window_len: a.window,
        channels: a.channels,
    };
    if spec.windows < 2 || spec.channels == 0 {
        return Err(Error::InvalidConfig(
            "need at least 2 windows and 1 channel".into(),
        ));
    }
    let mut buf = Vec::new();
    spec.write_csv(&mut buf)?;
    write(&a.out, buf)?;
    if let Some(path) = &a.config_out {
        let mut cfg = spec.config("synthetic");
        cfg.data = Some(std::path::absolute(&a.out).map_err(|e| Error::io(&a.out, e))?);
        write(path, pretty_json(&cfg))?;
    }
    out!("{} rows written to {}", spec.rows(), a.out.display());
    Ok(())
}
