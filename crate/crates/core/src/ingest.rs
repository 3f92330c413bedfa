//! Loading labeled multivariate time series, temporal splits and per-channel
//! standardization.

use std::io::Read;
use std::ops::Range;
use std::path::Path;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer class label attached to every time step and window.
pub type ClassLabel = i64;

/// A labeled, timestamped sequence of `d`-dimensional rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    timestamps: Vec<f64>,
    values: Vec<Vec<f64>>,
    labels: Vec<ClassLabel>,
    channel_names: Vec<String>,
}

impl TimeSeries {
    pub fn new(
        timestamps: Vec<f64>,
        values: Vec<Vec<f64>>,
        labels: Vec<ClassLabel>,
        channel_names: Vec<String>,
    ) -> Result<Self> {
        let d = channel_names.len();
        if d == 0 {
            return Err(Error::NoFeatures);
        }
        if values.len() != timestamps.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: timestamps.len(),
            });
        }
        if labels.len() != timestamps.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: timestamps.len(),
            });
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::MalformedRow {
                    row: i + 1,
                    message: format!("non-finite value {v}"),
                });
            }
        }
        for (i, pair) in timestamps.windows(2).enumerate() {
            if !(pair[1] > pair[0]) {
                return Err(Error::NonMonotoneTimestamps { row: i + 2 });
            }
        }
        Ok(Self {
            timestamps,
            values,
            labels,
            channel_names,
        })
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Number of feature channels.
    pub fn dim(&self) -> usize {
        self.channel_names.len()
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    /// Contiguous sub-series over `rows`.
    pub fn slice(&self, rows: Range<usize>) -> Result<Self> {
        if rows.start > rows.end || rows.end > self.len() {
            return Err(Error::InvalidSplit(format!(
                "rows {}..{} outside series of length {}",
                rows.start,
                rows.end,
                self.len()
            )));
        }
        Ok(Self {
            timestamps: self.timestamps[rows.clone()].to_vec(),
            values: self.values[rows.clone()].to_vec(),
            labels: self.labels[rows].to_vec(),
            channel_names: self.channel_names.clone(),
        })
    }
}

/// Which CSV columns hold the timestamp, the features and the label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub timestamp: String,
    pub features: Vec<String>,
    pub label: String,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
}

fn default_delimiter() -> char {
    ','
}

impl CsvSchema {
    pub fn new(timestamp: &str, features: &[&str], label: &str) -> Self {
        Self {
            timestamp: timestamp.to_string(),
            features: features.iter().map(|s| s.to_string()).collect(),
            label: label.to_string(),
            delimiter: ',',
        }
    }

    /// Schema of the normalized room-occupancy CSV produced by `scripts/fetch_datasets.py`.
    pub fn occupancy() -> Self {
        Self::new(
            "date",
            &["Temperature", "Humidity", "Light", "CO2", "HumidityRatio"],
            "Occupancy",
        )
    }

    /// Schema of the normalized activity-recognition CSV produced by `scripts/fetch_datasets.py`.
    pub fn activity() -> Self {
        Self::new(
            "time",
            &[
                "avg_rss12",
                "var_rss12",
                "avg_rss13",
                "var_rss13",
                "avg_rss23",
                "var_rss23",
            ],
            "label",
        )
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema).map_err(|e| match e {
        Error::Csv { message, .. } => Error::Csv {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

/// Parses CSV text from any reader. Row numbers in errors are 1-based file
/// line numbers (the header is line 1).
pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<TimeSeries> {
    if schema.features.is_empty() {
        return Err(Error::NoFeatures);
    }
    if !schema.delimiter.is_ascii() {
        return Err(Error::InvalidConfig(format!(
            "delimiter {:?} is not a single-byte character",
            schema.delimiter
        )));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter as u8)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Csv {
            path: Default::default(),
            message: e.to_string(),
        })?
        .clone();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(Error::EmptyData);
    }
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let ts_col = column(&schema.timestamp)?;
    let label_col = column(&schema.label)?;
    let feature_cols = schema
        .features
        .iter()
        .map(|f| column(f))
        .collect::<Result<Vec<_>>>()?;

    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::MalformedRow {
                row,
                message: e.to_string(),
            }
        })?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let cell = |col: usize, name: &str| {
            record.get(col).ok_or_else(|| Error::MalformedRow {
                row,
                message: format!("missing `{name}` cell"),
            })
        };
        let ts_text = cell(ts_col, &schema.timestamp)?;
        let ts = parse_timestamp(ts_text).ok_or_else(|| Error::MalformedRow {
            row,
            message: format!("unparseable timestamp `{ts_text}`"),
        })?;
        let mut point = Vec::with_capacity(feature_cols.len());
        for (&col, name) in feature_cols.iter().zip(&schema.features) {
            let text = cell(col, name)?;
            let v: f64 = text.parse().map_err(|_| Error::MalformedRow {
                row,
                message: format!("non-numeric value `{text}` in column `{name}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::MalformedRow {
                    row,
                    message: format!("non-finite value `{text}` in column `{name}`"),
                });
            }
            point.push(v);
        }
        let label_text = cell(label_col, &schema.label)?;
        let label = parse_label(label_text).ok_or_else(|| Error::MalformedRow {
            row,
            message: format!("label `{label_text}` is not an integer"),
        })?;
        if let Some(&prev) = timestamps.last() {
            if !(ts > prev) {
                return Err(Error::NonMonotoneTimestamps { row });
            }
        }
        timestamps.push(ts);
        values.push(point);
        labels.push(label);
    }
    if timestamps.is_empty() {
        return Err(Error::EmptyData);
    }
    TimeSeries::new(timestamps, values, labels, schema.features.clone())
}

/// Numeric timestamps are taken as-is; date-times become seconds since the epoch.
fn parse_timestamp(text: &str) -> Option<f64> {
    if let Ok(v) = text.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    const FORMATS: [&str; 4] = [
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M:%S%.f",
    ];
    FORMATS.iter().find_map(|fmt| {
        NaiveDateTime::parse_from_str(text, fmt)
            .ok()
            .map(|t| t.and_utc().timestamp_millis() as f64 / 1000.0)
    })
}

fn parse_label(text: &str) -> Option<ClassLabel> {
    if let Ok(v) = text.parse::<ClassLabel>() {
        return Some(v);
    }
    let v: f64 = text.parse().ok()?;
    (v.fract() == 0.0 && v.abs() < 1e15).then_some(v as ClassLabel)
}

/// One named, contiguous range of row indices (end exclusive).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRange {
    pub name: String,
    pub start: usize,
    pub end: usize,
}

impl SplitRange {
    pub fn new(name: &str, start: usize, end: usize) -> Self {
        Self {
            name: name.to_string(),
            start,
            end,
        }
    }

    pub fn rows(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Disjoint, contiguous row ranges of one series. The order of the list is
/// free (a test period may precede the training period) but each range keeps
/// its rows in time order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SplitSpec {
    ranges: Vec<SplitRange>,
}

impl SplitSpec {
    pub fn new(ranges: Vec<SplitRange>) -> Result<Self> {
        for (i, r) in ranges.iter().enumerate() {
            if r.start >= r.end {
                return Err(Error::InvalidSplit(format!(
                    "`{}` has empty range {}..{}",
                    r.name, r.start, r.end
                )));
            }
            for other in &ranges[..i] {
                if other.name == r.name {
                    return Err(Error::InvalidSplit(format!("duplicate name `{}`", r.name)));
                }
                if r.start < other.end && other.start < r.end {
                    return Err(Error::InvalidSplit(format!(
                        "`{}` overlaps `{}`",
                        r.name, other.name
                    )));
                }
            }
        }
        Ok(Self { ranges })
    }

    /// A single split covering the whole series.
    pub fn whole(name: &str, len: usize) -> Result<Self> {
        Self::new(vec![SplitRange::new(name, 0, len)])
    }

    pub fn ranges(&self) -> &[SplitRange] {
        &self.ranges
    }

    pub fn get(&self, name: &str) -> Result<&SplitRange> {
        self.ranges
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::InvalidSplit(format!("no split named `{name}`")))
    }

    /// Sub-spec holding only the named splits, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Self> {
        let ranges = names
            .iter()
            .map(|n| self.get(n).cloned())
            .collect::<Result<Vec<_>>>()?;
        Self::new(ranges)
    }

    pub fn check_bounds(&self, len: usize) -> Result<()> {
        match self.ranges.iter().find(|r| r.end > len) {
            Some(r) => Err(Error::InvalidSplit(format!(
                "`{}` ends at row {} but the series has {len} rows",
                r.name, r.end
            ))),
            None => Ok(()),
        }
    }

    /// All row indices covered, ascending.
    pub fn row_indices(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self.ranges.iter().flat_map(|r| r.rows()).collect();
        rows.sort_unstable();
        rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardizationMode {
    /// Fit on every row of the split spec (train plus evaluation period).
    #[default]
    FitOnCombined,
    /// Fit on the training rows only; avoids leaking test statistics.
    FitOnTrain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub means: Vec<f64>,
    pub standard_deviations: Vec<f64>,
    pub mode: StandardizationMode,
}

/// Fits per-channel mean and population standard deviation.
///
/// With [`StandardizationMode::FitOnCombined`] every range in `split` is used;
/// with [`StandardizationMode::FitOnTrain`] only the range named `train`.
pub fn fit_standardizer(
    series: &TimeSeries,
    split: &SplitSpec,
    mode: StandardizationMode,
    train: &str,
) -> Result<StandardizationParams> {
    split.check_bounds(series.len())?;
    let rows = match mode {
        StandardizationMode::FitOnCombined => split.row_indices(),
        StandardizationMode::FitOnTrain => split.get(train)?.rows().collect(),
    };
    if rows.is_empty() {
        return Err(Error::EmptySelection);
    }
    let d = series.dim();
    let n = rows.len() as f64;
    let mut means = vec![0.0; d];
    for &r in &rows {
        for (m, v) in means.iter_mut().zip(&series.values[r]) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    let mut variances = vec![0.0; d];
    for &r in &rows {
        for ((acc, v), m) in variances.iter_mut().zip(&series.values[r]).zip(&means) {
            *acc += (v - m) * (v - m);
        }
    }
    let mut standard_deviations = Vec::with_capacity(d);
    for (channel, var) in variances.into_iter().enumerate() {
        let sd = (var / n).sqrt();
        if !(sd > 0.0) || !sd.is_finite() {
            return Err(Error::ZeroVariance {
                channel,
                name: series.channel_names[channel].clone(),
            });
        }
        standard_deviations.push(sd);
    }
    Ok(StandardizationParams {
        means,
        standard_deviations,
        mode,
    })
}

/// Maps every value to `(x - mean) / sd`; timestamps and labels are untouched.
pub fn apply_standardizer(
    series: &TimeSeries,
    params: &StandardizationParams,
) -> Result<TimeSeries> {
    let d = series.dim();
    for len in [params.means.len(), params.standard_deviations.len()] {
        if len != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: len,
            });
        }
    }
    let values = series
        .values
        .iter()
        .map(|row| {
            row.iter()
                .zip(&params.means)
                .zip(&params.standard_deviations)
                .map(|((x, m), sd)| (x - m) / sd)
                .collect()
        })
        .collect();
    Ok(TimeSeries {
        timestamps: series.timestamps.clone(),
        values,
        labels: series.labels.clone(),
        channel_names: series.channel_names.clone(),
    })
}
