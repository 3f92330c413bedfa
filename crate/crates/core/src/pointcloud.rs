//! Symmetry-breaking translation and anchor-point augmentation of window
//! point clouds.
//!
//! Persistent homology of a Rips filtration only sees pairwise distances, so
//! it cannot tell apart clouds related by a rotation or a translation. Adding
//! a fixed offset `v` with distinct components to every point, and adjoining
//! fixed anchor points, makes the distances to the anchors depend on where the
//! cloud sits in each coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::windowing::LabeledWindow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub offset: Vec<f64>,
    pub anchors: Vec<Vec<f64>>,
}

impl AugmentConfig {
    pub fn new(offset: Vec<f64>, anchors: Vec<Vec<f64>>) -> Result<Self> {
        let d = offset.len();
        if d == 0 {
            return Err(Error::InvalidConfig("offset vector is empty".into()));
        }
        if let Some(a) = anchors.iter().find(|a| a.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: a.len(),
            });
        }
        Ok(Self { offset, anchors })
    }

    /// `v = (0, 1, ..., d-1)` with a single anchor at the origin.
    pub fn standard(d: usize) -> Self {
        Self {
            offset: default_offset(d),
            anchors: vec![vec![0.0; d]],
        }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }
}

/// `(0, 1, ..., d-1)`.
pub fn default_offset(d: usize) -> Vec<f64> {
    (0..d).map(|i| i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedCloud {
    /// Translated window points followed by the anchors.
    pub points: Vec<Vec<f64>>,
    pub source_window: usize,
    /// How many leading entries of `points` come from the window.
    pub translated: usize,
}

impl AugmentedCloud {
    /// A cloud with no augmentation, e.g. for direct persistence computations.
    pub fn from_points(points: Vec<Vec<f64>>) -> Self {
        let translated = points.len();
        Self {
            points,
            source_window: 0,
            translated,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn anchors(&self) -> &[Vec<f64>] {
        &self.points[self.translated..]
    }

    pub fn translated_points(&self) -> &[Vec<f64>] {
        &self.points[..self.translated]
    }
}

/// Returns `{x + v : x in window} ∪ anchors`, anchors appended last.
pub fn augment(window: &LabeledWindow, cfg: &AugmentConfig) -> Result<AugmentedCloud> {
    let d = cfg.dim();
    let mut points = Vec::with_capacity(window.points.len() + cfg.anchors.len());
    for x in &window.points {
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            });
        }
        points.push(x.iter().zip(&cfg.offset).map(|(a, b)| a + b).collect());
    }
    let translated = points.len();
    for a in &cfg.anchors {
        if a.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: a.len(),
            });
        }
        points.push(a.clone());
    }
    Ok(AugmentedCloud {
        points,
        source_window: window.index,
        translated,
    })
}

/// How the offset vector is chosen in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OffsetSpec {
    /// `"auto"` for `(0, 1, ..., d-1)`.
    Named(String),
    Vector(Vec<f64>),
}

impl Default for OffsetSpec {
    fn default() -> Self {
        OffsetSpec::Named("auto".into())
    }
}

/// How the anchor set is chosen in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnchorSpec {
    /// `"origin"` or `"none"`.
    Named(String),
    Points(Vec<Vec<f64>>),
}

impl Default for AnchorSpec {
    fn default() -> Self {
        AnchorSpec::Named("origin".into())
    }
}

impl OffsetSpec {
    /// Parses the CLI form: `auto` or a comma list.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim() == "auto" {
            Ok(OffsetSpec::Named("auto".into()))
        } else {
            parse_list(text).map(OffsetSpec::Vector)
        }
    }

    pub fn resolve(&self, d: usize) -> Result<Vec<f64>> {
        match self {
            OffsetSpec::Named(name) if name == "auto" => Ok(default_offset(d)),
            OffsetSpec::Named(name) => {
                Err(Error::InvalidConfig(format!("unknown offset `{name}`")))
            }
            OffsetSpec::Vector(v) if v.len() == d => Ok(v.clone()),
            OffsetSpec::Vector(v) => Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            }),
        }
    }
}

impl AnchorSpec {
    /// Parses repeated CLI values: `origin`, `none`, or comma lists (one per anchor).
    pub fn parse(values: &[String]) -> Result<Self> {
        match values {
            [one] if one.trim() == "origin" || one.trim() == "none" => {
                Ok(AnchorSpec::Named(one.trim().to_string()))
            }
            _ => values
                .iter()
                .map(|v| parse_list(v))
                .collect::<Result<Vec<_>>>()
                .map(AnchorSpec::Points),
        }
    }

    pub fn resolve(&self, d: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            AnchorSpec::Named(name) if name == "origin" => Ok(vec![vec![0.0; d]]),
            AnchorSpec::Named(name) if name == "none" => Ok(Vec::new()),
            AnchorSpec::Named(name) => {
                Err(Error::InvalidConfig(format!("unknown anchor set `{name}`")))
            }
            AnchorSpec::Points(points) => Ok(points.clone()),
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidConfig(format!("`{t}` is not a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn window(points: Vec<Vec<f64>>) -> LabeledWindow {
        LabeledWindow {
            index: 7,
            points,
            label: 0,
            time_range: (0.0, 1.0),
        }
    }

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn default_offsets() {
        assert_eq!(default_offset(5), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(default_offset(6), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(default_offset(1), vec![0.0]);
    }

    #[test]
    fn worked_example_clouds() {
        let cfg = AugmentConfig::standard(5);
        let x1 = window(vec![vec![0.0; 5], vec![1.0, 0.0, 0.0, 0.0, 0.0]]);
        let y1 = augment(&x1, &cfg).unwrap();
        assert_eq!(
            y1.points,
            vec![
                vec![0.0, 1.0, 2.0, 3.0, 4.0],
                vec![1.0, 1.0, 2.0, 3.0, 4.0],
                vec![0.0; 5]
            ]
        );
        assert_eq!(y1.source_window, 7);
        assert_eq!(y1.anchors(), &[vec![0.0; 5]]);

        let x2 = window(vec![vec![0.0; 5], vec![0.0, 1.0, 0.0, 0.0, 0.0]]);
        let y2 = augment(&x2, &cfg).unwrap();
        assert_eq!(y2.points[1], vec![0.0, 2.0, 2.0, 3.0, 4.0]);
        assert_eq!(dist(&y1.points[1], &y1.points[2]), 31f64.sqrt());
        assert_eq!(dist(&y2.points[1], &y2.points[2]), 33f64.sqrt());
        // the raw clouds were indistinguishable
        assert_eq!(
            dist(&x1.points[0], &x1.points[1]),
            dist(&x2.points[0], &x2.points[1])
        );
    }

    #[test]
    fn zero_offset_no_anchor_is_identity() {
        let cfg = AugmentConfig::new(vec![0.0; 3], vec![]).unwrap();
        let w = window(vec![vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 2.0]]);
        let y = augment(&w, &cfg).unwrap();
        assert_eq!(y.points, w.points);
    }

    #[test]
    fn dimension_checks() {
        assert!(AugmentConfig::new(vec![0.0, 1.0], vec![vec![0.0]]).is_err());
        let cfg = AugmentConfig::standard(3);
        let w = window(vec![vec![1.0, 2.0]]);
        assert!(matches!(
            augment(&w, &cfg),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn specs_resolve() {
        assert_eq!(
            OffsetSpec::parse("auto").unwrap().resolve(3).unwrap(),
            vec![0.0, 1.0, 2.0]
        );
        assert_eq!(
            OffsetSpec::parse("1, 2.5").unwrap().resolve(2).unwrap(),
            vec![1.0, 2.5]
        );
        assert!(OffsetSpec::parse("1,x").is_err());
        assert!(OffsetSpec::parse("1,2").unwrap().resolve(3).is_err());
        assert_eq!(
            AnchorSpec::parse(&["origin".into()])
                .unwrap()
                .resolve(2)
                .unwrap(),
            vec![vec![0.0, 0.0]]
        );
        assert!(AnchorSpec::parse(&["none".into()])
            .unwrap()
            .resolve(2)
            .unwrap()
            .is_empty());
        assert_eq!(
            AnchorSpec::parse(&["1,1".into(), "2,2".into()])
                .unwrap()
                .resolve(2)
                .unwrap(),
            vec![vec![1.0, 1.0], vec![2.0, 2.0]]
        );
        let json: AnchorSpec = serde_json::from_str("\"origin\"").unwrap();
        assert_eq!(json, AnchorSpec::default());
        let json: OffsetSpec = serde_json::from_str("[0, 1]").unwrap();
        assert_eq!(json, OffsetSpec::Vector(vec![0.0, 1.0]));
    }

    fn cloud() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 4), 2..8)
    }

    proptest! {
        #[test]
        fn translation_preserves_pairwise_distances(points in cloud()) {
            let cfg = AugmentConfig::standard(4);
            let y = augment(&window(points.clone()), &cfg).unwrap();
            for i in 0..points.len() {
                for j in 0..points.len() {
                    let before = dist(&points[i], &points[j]);
                    let after = dist(&y.points[i], &y.points[j]);
                    prop_assert!((before - after).abs() <= 1e-12);
                }
                let expect: Vec<f64> = points[i].iter().zip(&cfg.offset).map(|(a, b)| a + b).collect();
                prop_assert_eq!(dist(&y.points[i], &y.anchors()[0]), dist(&expect, &[0.0; 4]));
            }
        }

        #[test]
        fn translated_clouds_differ_in_anchor_distance(
            points in cloud(),
            shift in prop::collection::vec(-2.0f64..2.0, 4),
        ) {
            prop_assume!(shift.iter().any(|t| t.abs() > 1e-3));
            let cfg = AugmentConfig::standard(4);
            let moved: Vec<Vec<f64>> = points
                .iter()
                .map(|p| p.iter().zip(&shift).map(|(a, b)| a + b).collect())
                .collect();
            let a = augment(&window(points), &cfg).unwrap();
            let b = augment(&window(moved), &cfg).unwrap();
            let differs = (0..a.translated).any(|i| {
                (dist(&a.points[i], &a.anchors()[0]) - dist(&b.points[i], &b.anchors()[0])).abs() > 1e-12
            });
            prop_assert!(differs);
        }
    }
}
