//! Brute-force oracles and random generators shared by the integration tests.
//! Everything here is deliberately naive and independent of the library's
//! algorithms (no MST, no Hungarian, no column reduction).

#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use toposeries::persistence::PersistenceDiagram;

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn random_cloud(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

/// Random diagram with up to `max_points` pairs, births in [0, 1), lifetimes in (0, 2).
pub fn random_diagram(rng: &mut impl Rng, max_points: usize) -> Vec<(f64, f64)> {
    let n = rng.random_range(0..=max_points);
    (0..n)
        .map(|_| {
            let b: f64 = rng.random_range(0.0..1.0);
            (b, b + rng.random_range(0.01..2.0))
        })
        .collect()
}

fn components(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> usize {
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for u in 0..n {
                if !seen[u] && adjacent(v, u) {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    count
}

/// Sorted dim-0 deaths from counting components of the ε-threshold graph
/// at every candidate ε: the number of deaths at ε is the drop in the
/// component count there.
pub fn dim0_deaths_oracle(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut eps: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            eps.push(euclid(&points[i], &points[j]));
        }
    }
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    let mut deaths = Vec::new();
    let mut previous = n;
    for &e in &eps {
        let c = components(n, |a, b| euclid(&points[a], &points[b]) <= e);
        deaths.extend(std::iter::repeat_n(e, previous - c));
        previous = c;
    }
    deaths
}

/// Gaussian elimination over GF(2) on bitmask rows; returns the rank.
fn gf2_rank(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        let mask = 1u64 << bit;
        let Some(p) = (rank..rows.len()).find(|&r| rows[r] & mask != 0) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r] & mask != 0 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

/// Cycle space of the given edges (as edge bitmasks), via kernel tracking.
fn cycle_basis(edges: &[(usize, usize, usize)]) -> Vec<u64> {
    // (vertex boundary, combination of edges)
    let mut reduced: Vec<(u64, u64)> = Vec::new();
    let mut cycles = Vec::new();
    for &(id, a, b) in edges {
        let mut boundary = (1u64 << a) | (1u64 << b);
        let mut combo = 1u64 << id;
        while let Some(&(pb, pc)) = reduced
            .iter()
            .find(|(rb, _)| rb.trailing_zeros() == boundary.trailing_zeros())
        {
            boundary ^= pb;
            combo ^= pc;
            if boundary == 0 {
                break;
            }
        }
        if boundary == 0 {
            cycles.push(combo);
        } else {
            reduced.push((boundary, combo));
        }
    }
    cycles
}

/// Sorted dim-1 pairs of the Rips filtration truncated at `maxscale`, from
/// persistent Betti numbers β(a, b) = rank(Z₁(K_a) + B₁(K_b)) − rank B₁(K_b)
/// and inclusion–exclusion over the critical values. Classes alive at
/// `maxscale` die there.
pub fn dim1_pairs_oracle(points: &[Vec<f64>], maxscale: f64) -> Vec<(f64, f64)> {
    let n = points.len();
    let mut edges = Vec::new(); // (id, i, j, length)
    for i in 0..n {
        for j in i + 1..n {
            let l = euclid(&points[i], &points[j]);
            if l <= maxscale {
                edges.push((edges.len(), i, j, l));
            }
        }
    }
    assert!(edges.len() <= 64);
    let edge_of = |i: usize, j: usize| edges.iter().find(|e| e.1 == i && e.2 == j).map(|e| e.0);
    let mut triangles = Vec::new(); // (edge mask, value)
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if let (Some(a), Some(b), Some(c)) = (edge_of(i, j), edge_of(i, k), edge_of(j, k)) {
                    let v = edges[a].3.max(edges[b].3).max(edges[c].3);
                    triangles.push(((1u64 << a) | (1u64 << b) | (1u64 << c), v));
                }
            }
        }
    }
    let mut critical: Vec<f64> = edges.iter().map(|e| e.3).collect();
    critical.extend(triangles.iter().map(|t| t.1));
    critical.sort_by(f64::total_cmp);
    critical.dedup();

    let beta = |a: f64, b: f64| -> usize {
        let in_a: Vec<_> = edges
            .iter()
            .filter(|e| e.3 <= a)
            .map(|e| (e.0, e.1, e.2))
            .collect();
        let z = cycle_basis(&in_a);
        let bnd: Vec<u64> = triangles.iter().filter(|t| t.1 <= b).map(|t| t.0).collect();
        let mut both = z.clone();
        both.extend(&bnd);
        gf2_rank(both) - gf2_rank(bnd)
    };
    // β at the scale just below the i-th critical value
    let before = |i: usize| if i == 0 { -1.0 } else { critical[i - 1] };

    let m = critical.len();
    let mut pairs = Vec::new();
    for i in 0..m {
        let a = critical[i];
        for j in i + 1..m {
            let b = critical[j];
            let mu = beta(a, critical[j - 1]) as i64
                - beta(a, b) as i64
                - beta(before(i), critical[j - 1]) as i64
                + beta(before(i), b) as i64;
            assert!(mu >= 0, "negative multiplicity");
            pairs.extend(std::iter::repeat_n((a, b), mu as usize));
        }
        if a < maxscale {
            let top = critical[m - 1];
            let alive = beta(a, top) as i64 - beta(before(i), top) as i64;
            pairs.extend(std::iter::repeat_n((a, maxscale), alive.max(0) as usize));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    pairs
}

pub fn sorted_pairs(d: &PersistenceDiagram) -> Vec<(f64, f64)> {
    let mut v: Vec<_> = d.pairs.iter().map(|p| (p.birth, p.death)).collect();
    v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    v
}

/// p-Wasserstein distance by enumerating every partial matching: each point
/// of `a` goes to a distinct point of `b` or to the diagonal; leftovers of
/// `b` go to the diagonal. Ground metric L∞.
pub fn wasserstein_oracle(a: &[(f64, f64)], b: &[(f64, f64)], p: f64) -> f64 {
    fn linf(x: (f64, f64), y: (f64, f64)) -> f64 {
        (x.0 - y.0).abs().max((x.1 - y.1).abs())
    }
    fn diag(x: (f64, f64)) -> f64 {
        (x.1 - x.0) / 2.0
    }
    fn go(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, p: f64) -> f64 {
        if i == a.len() {
            return b
                .iter()
                .zip(used.iter())
                .filter(|(_, u)| !**u)
                .map(|(y, _)| diag(*y).powf(p))
                .sum();
        }
        let mut best = diag(a[i]).powf(p) + go(i + 1, a, b, used, p);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(linf(a[i], b[j]).powf(p) + go(i + 1, a, b, used, p));
                used[j] = false;
            }
        }
        best
    }
    go(0, a, b, &mut vec![false; b.len()], p).powf(1.0 / p)
}
