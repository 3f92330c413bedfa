//! Seeded two-class synthetic series for smoke tests and demos.
//!
//! Windows come in blocks of five of the same class. Class 0 rows are i.i.d.
//! Gaussian noise with standard deviation 0.1, class 1 rows with 2.0.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ingest::{ClassLabel, CsvSchema, SplitRange};

use super::PipelineConfig;

pub const QUIET_SIGMA: f64 = 0.1;
pub const NOISY_SIGMA: f64 = 2.0;
const BLOCK: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub windows: usize,
    pub window_len: usize,
    pub channels: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            seed: 7,
            windows: 100,
            window_len: 10,
            channels: 3,
        }
    }
}

impl SyntheticSpec {
    pub fn rows(&self) -> usize {
        self.windows * self.window_len
    }

    pub fn window_class(&self, n: usize) -> ClassLabel {
        ((n / BLOCK) % 2) as ClassLabel
    }

    pub fn schema(&self) -> CsvSchema {
        CsvSchema {
            timestamp: "t".into(),
            features: (0..self.channels).map(|c| format!("x{c}")).collect(),
            label: "label".into(),
            delimiter: ',',
        }
    }

    /// Writes `t,x0..,label` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let quiet = Normal::new(0.0, QUIET_SIGMA).expect("valid sigma");
        let noisy = Normal::new(0.0, NOISY_SIGMA).expect("valid sigma");
        let mut w = csv::Writer::from_writer(out);
        let schema = self.schema();
        let header = std::iter::once(schema.timestamp.clone())
            .chain(schema.features.iter().cloned())
            .chain(std::iter::once(schema.label.clone()));
        let err = |e: csv::Error| Error::Csv {
            path: Default::default(),
            message: e.to_string(),
        };
        w.write_record(header).map_err(err)?;
        for row in 0..self.rows() {
            let class = self.window_class(row / self.window_len);
            let dist = if class == 0 { &quiet } else { &noisy };
            let mut record = vec![row.to_string()];
            record.extend((0..self.channels).map(|_| dist.sample(&mut rng).to_string()));
            record.push(class.to_string());
            w.write_record(&record).map_err(err)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }

    /// Default pipeline over this data: first 80% of windows train, rest test.
    pub fn config(&self, run_id: &str) -> PipelineConfig {
        let train_windows = self.windows * 4 / 5;
        let cut = train_windows * self.window_len;
        let mut cfg: PipelineConfig = serde_json::from_value(serde_json::json!({
            "run_id": run_id,
            "schema": self.schema(),
            "splits": [
                SplitRange::new("train", 0, cut),
                SplitRange::new("test", cut, self.rows()),
            ],
            "train_split": "train",
            "test_splits": ["test"],
            "seed": self.seed,
        }))
        .expect("static config");
        cfg.window.w = self.window_len;
        cfg.window.s = self.window_len;
        cfg.knn.k = cfg.knn.k.min(train_windows);
        cfg
    }
}
