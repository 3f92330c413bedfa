use std::cmp::Ordering;

use super::union_find::DisjointSet;
use super::{EssentialPolicy, PersistenceDiagram, PersistencePair};
use crate::error::{Error, Result};
use crate::pointcloud::AugmentedCloud;

/// Dense Euclidean distance matrix.
pub fn pairwise_distances(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    i: usize,
    j: usize,
    length: f64,
}

fn sorted_edges(dist: &[Vec<f64>]) -> Vec<Edge> {
    let n = dist.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push(Edge {
                i,
                j,
                length: dist[i][j],
            });
        }
    }
    // stable sort keeps lexicographic (i, j) order among equal lengths
    edges.sort_by(|a, b| a.length.total_cmp(&b.length));
    edges
}

/// Dimension-0 diagram: one `(0, l)` pair per MST edge of length `l`.
/// The surviving component is dropped or capped per `essential`.
pub fn rips_persistence_dim0(
    cloud: &AugmentedCloud,
    essential: EssentialPolicy,
) -> PersistenceDiagram {
    let n = cloud.len();
    let dist = pairwise_distances(&cloud.points);
    let mut components = DisjointSet::new(n);
    let mut pairs = Vec::with_capacity(n.saturating_sub(1));
    for e in sorted_edges(&dist) {
        if components.union(e.i, e.j) {
            pairs.push(PersistencePair::new(0.0, e.length));
            if pairs.len() + 1 == n {
                break;
            }
        }
    }
    if let EssentialPolicy::Capped(cap) = essential {
        if n > 0 {
            pairs.push(PersistencePair::new(0.0, cap));
        }
    }
    PersistenceDiagram::new(0, pairs, essential)
}

#[derive(Debug, Clone)]
struct Simplex {
    value: f64,
    dim: usize,
    /// Position within its dimension in lexicographic vertex order.
    index: usize,
    /// Facets as indices into the dimension-below list.
    facets: Vec<usize>,
}

/// Dimension-1 diagram of the Rips complex truncated at `maxscale`.
///
/// Simplices are filtered by `(value, dimension, index)`, the boundary matrix
/// is reduced left to right over Z/2, and each triangle column whose pivot is
/// an edge yields a pair `(value(edge), value(triangle))`. Cycles still alive
/// at `maxscale` are reported with death `maxscale`. Pairs of zero
/// persistence are omitted.
pub fn rips_persistence_dim1(cloud: &AugmentedCloud, maxscale: f64) -> Result<PersistenceDiagram> {
    if !(maxscale > 0.0) {
        return Err(Error::InvalidMaxscale(maxscale));
    }
    let n = cloud.len();
    let dist = pairwise_distances(&cloud.points);

    let mut simplices: Vec<Simplex> = (0..n)
        .map(|v| Simplex {
            value: 0.0,
            dim: 0,
            index: v,
            facets: Vec::new(),
        })
        .collect();
    let mut edge_id = vec![vec![usize::MAX; n]; n];
    let mut edge_count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] <= maxscale {
                edge_id[i][j] = edge_count;
                simplices.push(Simplex {
                    value: dist[i][j],
                    dim: 1,
                    index: edge_count,
                    facets: vec![i, j],
                });
                edge_count += 1;
            }
        }
    }
    let mut tri_count = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (ij, ik, jk) = (edge_id[i][j], edge_id[i][k], edge_id[j][k]);
                if ij == usize::MAX || ik == usize::MAX || jk == usize::MAX {
                    continue;
                }
                simplices.push(Simplex {
                    value: dist[i][j].max(dist[i][k]).max(dist[j][k]),
                    dim: 2,
                    index: tri_count,
                    facets: vec![ij, ik, jk],
                });
                tri_count += 1;
            }
        }
    }

    simplices.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.dim.cmp(&b.dim))
            .then(a.index.cmp(&b.index))
    });
    // position in the filtration of every (dim, index)
    let mut position = [vec![0; n], vec![0; edge_count], vec![0; tri_count]];
    for (pos, s) in simplices.iter().enumerate() {
        position[s.dim][s.index] = pos;
    }

    let total = simplices.len();
    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|s| {
            if s.dim == 0 {
                return Vec::new();
            }
            let mut col: Vec<usize> = s.facets.iter().map(|&f| position[s.dim - 1][f]).collect();
            col.sort_unstable();
            col
        })
        .collect();
    let mut pivot_owner = vec![usize::MAX; total];
    let mut killed = vec![false; total];
    let mut pairs = Vec::new();
    for j in 0..total {
        while let Some(&low) = columns[j].last() {
            let owner = pivot_owner[low];
            if owner == usize::MAX {
                break;
            }
            let reduced = symmetric_difference(&columns[j], &columns[owner]);
            columns[j] = reduced;
        }
        if let Some(&low) = columns[j].last() {
            pivot_owner[low] = j;
            killed[low] = true;
            if simplices[j].dim == 2 {
                let birth = simplices[low].value;
                let death = simplices[j].value;
                if death > birth {
                    pairs.push(PersistencePair::new(birth, death));
                }
            }
        }
    }
    // positive edges (zero column) never killed by a triangle
    for j in 0..total {
        if simplices[j].dim == 1 && columns[j].is_empty() && !killed[j] {
            let birth = simplices[j].value;
            if birth < maxscale {
                pairs.push(PersistencePair::new(birth, maxscale));
            }
        }
    }
    Ok(PersistenceDiagram::new(
        1,
        pairs,
        EssentialPolicy::Capped(maxscale),
    ))
}

/// Z/2 sum of two sorted index lists.
fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
