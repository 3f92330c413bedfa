use serde::{Deserialize, Serialize};

use super::hungarian::min_cost_assignment;
use crate::error::{Error, Result};
use crate::persistence::{PersistenceDiagram, PersistencePair};

/// Ground metric between diagram points is always L∞ on `(birth, death)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WassersteinConfig {
    #[serde(default = "default_p")]
    pub p: f64,
    /// Homology dimension compared.
    #[serde(default)]
    pub dimension: usize,
}

fn default_p() -> f64 {
    1.0
}

impl Default for WassersteinConfig {
    fn default() -> Self {
        Self {
            p: 1.0,
            dimension: 0,
        }
    }
}

impl WassersteinConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "Wasserstein order p must be a finite real >= 1, got {}",
                self.p
            )));
        }
        Ok(())
    }
}

/// L∞ distance between two diagram points.
pub fn linf(a: &PersistencePair, b: &PersistencePair) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

/// L∞ distance from a point to its diagonal projection `((b+d)/2, (b+d)/2)`.
pub fn diagonal_distance(a: &PersistencePair) -> f64 {
    (a.death - a.birth).abs() / 2.0
}

/// p-Wasserstein distance between two finite diagrams.
///
/// Each diagram is augmented with the diagonal projections of the other's
/// points; a point matched to any diagonal slot pays its distance to the
/// diagonal, diagonal-to-diagonal matches are free, and the optimal perfect
/// matching is found exactly with the Hungarian method.
pub fn wasserstein(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    cfg: &WassersteinConfig,
) -> Result<f64> {
    cfg.validate()?;
    if d1.dim != d2.dim {
        return Err(Error::DiagramDimensionMismatch {
            left: d1.dim,
            right: d2.dim,
        });
    }
    if !d1.is_finite() || !d2.is_finite() {
        return Err(Error::NonFiniteDiagram);
    }
    let p = cfg.p;
    let pow = |x: f64| if p == 1.0 { x } else { x.powf(p) };
    let (a, b) = (&d1.pairs, &d2.pairs);

    let total = if a.is_empty() || b.is_empty() {
        a.iter()
            .chain(b)
            .map(|x| pow(diagonal_distance(x)))
            .sum::<f64>()
    } else {
        let (n, m) = (a.len(), b.len());
        let size = n + m;
        let mut cost = vec![vec![0.0; size]; size];
        for (i, x) in a.iter().enumerate() {
            let to_diag = pow(diagonal_distance(x));
            for j in 0..size {
                cost[i][j] = if j < m { pow(linf(x, &b[j])) } else { to_diag };
            }
        }
        for (j, y) in b.iter().enumerate() {
            let to_diag = pow(diagonal_distance(y));
            for row in cost.iter_mut().skip(n) {
                row[j] = to_diag;
            }
        }
        let assignment = min_cost_assignment(&cost);
        assignment
            .iter()
            .enumerate()
            .map(|(r, &c)| cost[r][c])
            .sum::<f64>()
    };
    Ok(if p == 1.0 { total } else { total.powf(1.0 / p) })
}
