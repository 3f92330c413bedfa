//! Vietoris–Rips persistence diagrams of point clouds.
//!
//! Dimension 0 is computed from the minimum spanning tree of the complete
//! distance graph (Kruskal with union-find): every merge at edge length `l`
//! kills a component born at 0. Dimension 1 uses boundary-matrix reduction
//! over Z/2 on the Rips complex truncated at a maximal scale.

mod rips;
mod union_find;

use std::cmp::Ordering;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use rips::{pairwise_distances, rips_persistence_dim0, rips_persistence_dim1};

/// What to do with classes that never die inside the filtration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EssentialPolicy {
    #[default]
    Dropped,
    /// Report them with death equal to the given scale.
    Capped(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    fn cmp_death_birth(&self, other: &Self) -> Ordering {
        self.death
            .total_cmp(&other.death)
            .then(self.birth.total_cmp(&other.birth))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub dim: usize,
    pub pairs: Vec<PersistencePair>,
    pub essential_policy: EssentialPolicy,
}

impl PersistenceDiagram {
    pub fn new(
        dim: usize,
        mut pairs: Vec<PersistencePair>,
        essential_policy: EssentialPolicy,
    ) -> Self {
        pairs.sort_by(PersistencePair::cmp_death_birth);
        Self {
            dim,
            pairs,
            essential_policy,
        }
    }

    pub fn empty(dim: usize) -> Self {
        Self::new(dim, Vec::new(), EssentialPolicy::Dropped)
    }

    pub fn from_pairs(dim: usize, pairs: &[(f64, f64)]) -> Self {
        Self::new(
            dim,
            pairs
                .iter()
                .map(|&(b, d)| PersistencePair::new(b, d))
                .collect(),
            EssentialPolicy::Dropped,
        )
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.pairs
            .iter()
            .all(|p| p.birth.is_finite() && p.death.is_finite())
    }

    pub fn deaths(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.death).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceConfig {
    /// Highest homology dimension computed (0 or 1).
    #[serde(default)]
    pub max_dimension: usize,
    #[serde(default)]
    pub essential: EssentialPolicy,
    /// Rips truncation scale; required for dimension 1.
    #[serde(default)]
    pub maxscale: Option<f64>,
}

impl Default for PersistenceConfig {
    fn default() -> Self {
        Self {
            max_dimension: 0,
            essential: EssentialPolicy::Dropped,
            maxscale: None,
        }
    }
}

impl PersistenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_dimension > 1 {
            return Err(Error::InvalidConfig(format!(
                "homology dimension {} is not supported (0 or 1)",
                self.max_dimension
            )));
        }
        if let EssentialPolicy::Capped(cap) = self.essential {
            if !(cap > 0.0) {
                return Err(Error::InvalidMaxscale(cap));
            }
        }
        if self.max_dimension == 1 {
            match self.maxscale {
                Some(m) if m > 0.0 => {}
                Some(m) => return Err(Error::InvalidMaxscale(m)),
                None => {
                    return Err(Error::InvalidConfig(
                        "dimension 1 persistence needs a maxscale".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

/// Diagrams for dimensions `0..=cfg.max_dimension`, indexed by dimension.
pub fn compute_diagrams(
    cloud: &crate::pointcloud::AugmentedCloud,
    cfg: &PersistenceConfig,
) -> Result<Vec<PersistenceDiagram>> {
    cfg.validate()?;
    let mut out = vec![rips_persistence_dim0(cloud, cfg.essential)];
    if cfg.max_dimension >= 1 {
        let maxscale = cfg.maxscale.unwrap_or_default();
        out.push(if cloud.len() >= 3 {
            rips_persistence_dim1(cloud, maxscale)?
        } else {
            PersistenceDiagram::new(1, Vec::new(), EssentialPolicy::Capped(maxscale))
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramRow {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

/// Flattens diagrams into rows sorted by `(dim, death, birth)`.
pub fn diagram_to_rows(diagrams: &[PersistenceDiagram]) -> Vec<DiagramRow> {
    let mut rows: Vec<DiagramRow> = diagrams
        .iter()
        .flat_map(|d| {
            d.pairs.iter().map(move |p| DiagramRow {
                dim: d.dim,
                birth: p.birth,
                death: p.death,
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.death.total_cmp(&b.death))
            .then(a.birth.total_cmp(&b.birth))
    });
    rows
}

/// Diagrams of one window, indexed by homology dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowDiagrams {
    pub window: usize,
    pub diagrams: Vec<PersistenceDiagram>,
}

impl WindowDiagrams {
    pub fn dimension(&self, dim: usize) -> Result<&PersistenceDiagram> {
        self.diagrams.get(dim).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "window {} has no dimension {dim} diagram",
                self.window
            ))
        })
    }
}

/// Writes `dim,birth,death` rows for a single diagram set.
pub fn write_diagram_csv<W: Write>(out: W, diagrams: &[PersistenceDiagram]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dim", "birth", "death"]).map_err(csv_err)?;
    for r in diagram_to_rows(diagrams) {
        w.write_record([r.dim.to_string(), r.birth.to_string(), r.death.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// Writes the long format `window,dim,birth,death` keyed by window index.
pub fn write_window_diagrams_csv<W: Write>(out: W, sets: &[WindowDiagrams]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["window", "dim", "birth", "death"])
        .map_err(csv_err)?;
    for set in sets {
        for r in diagram_to_rows(&set.diagrams) {
            w.write_record([
                set.window.to_string(),
                r.dim.to_string(),
                r.birth.to_string(),
                r.death.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// Reads either CSV layout. Without a `window` column everything is window 0.
/// Windows are those that appear in the file, in ascending order; dimensions
/// up to the highest one seen are present for every window (possibly empty).
pub fn read_window_diagrams_csv<R: Read>(input: R) -> Result<Vec<WindowDiagrams>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let window_col = col("window");
    let dim_col = col("dim").ok_or_else(|| Error::MissingColumn("dim".into()))?;
    let birth_col = col("birth").ok_or_else(|| Error::MissingColumn("birth".into()))?;
    let death_col = col("death").ok_or_else(|| Error::MissingColumn("death".into()))?;

    let mut by_window: std::collections::BTreeMap<usize, Vec<(usize, PersistencePair)>> =
        Default::default();
    let mut max_dim = 0;
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let field = |c: usize| -> Result<&str> {
            record.get(c).ok_or_else(|| Error::MalformedRow {
                row,
                message: "missing field".into(),
            })
        };
        let bad = |what: &str, text: &str| Error::MalformedRow {
            row,
            message: format!("invalid {what} `{text}`"),
        };
        let window = match window_col {
            Some(c) => field(c)?
                .parse()
                .map_err(|_| bad("window", field(c).unwrap_or("")))?,
            None => 0,
        };
        let dim: usize = field(dim_col)?
            .parse()
            .map_err(|_| bad("dim", field(dim_col).unwrap_or("")))?;
        let birth: f64 = field(birth_col)?
            .parse()
            .map_err(|_| bad("birth", field(birth_col).unwrap_or("")))?;
        let death: f64 = field(death_col)?
            .parse()
            .map_err(|_| bad("death", field(death_col).unwrap_or("")))?;
        if !(birth <= death) {
            return Err(bad("pair (birth > death)", &format!("{birth},{death}")));
        }
        max_dim = max_dim.max(dim);
        by_window
            .entry(window)
            .or_default()
            .push((dim, PersistencePair::new(birth, death)));
    }
    Ok(by_window
        .into_iter()
        .map(|(window, pairs)| WindowDiagrams {
            window,
            diagrams: (0..=max_dim)
                .map(|dim| {
                    PersistenceDiagram::new(
                        dim,
                        pairs
                            .iter()
                            .filter(|(d, _)| *d == dim)
                            .map(|(_, p)| *p)
                            .collect(),
                        EssentialPolicy::Dropped,
                    )
                })
                .collect(),
        })
        .collect())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv {
        path: Default::default(),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_sorted_and_grouped() {
        assert!(diagram_to_rows(&[PersistenceDiagram::empty(0)]).is_empty());
        let d0 = PersistenceDiagram::from_pairs(0, &[(0.0, 2.0), (0.0, 1.0)]);
        let rows = diagram_to_rows(std::slice::from_ref(&d0));
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.dim == 0));
        assert_eq!(rows[0].death, 1.0);

        let d1 = PersistenceDiagram::from_pairs(1, &[(1.0, 1.5)]);
        let rows = diagram_to_rows(&[d1, d0]);
        let dims: Vec<usize> = rows.iter().map(|r| r.dim).collect();
        assert_eq!(dims, vec![0, 0, 1]);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let sets = vec![
            WindowDiagrams {
                window: 3,
                diagrams: vec![
                    PersistenceDiagram::from_pairs(0, &[(0.0, 0.1 + 0.2), (0.0, 1.0 / 3.0)]),
                    PersistenceDiagram::empty(1),
                ],
            },
            WindowDiagrams {
                window: 5,
                diagrams: vec![
                    PersistenceDiagram::from_pairs(0, &[(0.0, 2f64.sqrt())]),
                    PersistenceDiagram::from_pairs(1, &[(1.0, 2f64.sqrt())]),
                ],
            },
        ];
        let mut buf = Vec::new();
        write_window_diagrams_csv(&mut buf, &sets).unwrap();
        let back = read_window_diagrams_csv(buf.as_slice()).unwrap();
        assert_eq!(back, sets);
    }

    #[test]
    fn single_diagram_csv() {
        let mut buf = Vec::new();
        write_diagram_csv(
            &mut buf,
            &[PersistenceDiagram::from_pairs(0, &[(0.0, 1.0), (0.0, 2.0)])],
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "dim,birth,death\n0,0,1\n0,0,2\n"
        );
        let back = read_window_diagrams_csv(buf.as_slice()).unwrap();
        assert_eq!(back[0].window, 0);
        assert_eq!(back[0].diagrams[0].len(), 2);
    }

    #[test]
    fn rejects_inverted_pair() {
        let text = "dim,birth,death\n0,2,1\n";
        assert!(read_window_diagrams_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(PersistenceConfig::default().validate().is_ok());
        let mut cfg = PersistenceConfig {
            max_dimension: 1,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.maxscale = Some(-1.0);
        assert!(matches!(cfg.validate(), Err(Error::InvalidMaxscale(_))));
        cfg.maxscale = Some(2.0);
        assert!(cfg.validate().is_ok());
        cfg.max_dimension = 2;
        assert!(cfg.validate().is_err());
    }
}
