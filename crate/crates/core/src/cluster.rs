//! K-means and external clustering metrics.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

const LLOYD_MAX_ITERS: usize = 300;

/// One k-means run: labels plus within-cluster sum of squares.
#[derive(Debug, Clone)]
pub struct KmeansRun {
    pub labels: Vec<usize>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lloyd(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> KmeansRun {
    let n = points.len();
    let dim = points[0].len();

    // k-means++ seeding
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(points[rng.gen_range(0..n)].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total <= 0.0 {
            // all remaining mass at distance zero; any point will do
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, w) in d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centers.push(points[next].clone());
        for (i, p) in points.iter().enumerate() {
            let d = sq_dist(p, centers.last().unwrap());
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }

    let mut labels = vec![0usize; n];
    for _ in 0..LLOYD_MAX_ITERS {
        // assign
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(p, center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        // update
        let mut counts = vec![0usize; k];
        let mut sums = vec![vec![0.0; dim]; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // re-seed an empty cluster from the point farthest from its
                // current center
                let far = (0..n)
                    .max_by(|&i, &j| {
                        let di = sq_dist(&points[i], &centers[labels[i]]);
                        let dj = sq_dist(&points[j], &centers[labels[j]]);
                        di.total_cmp(&dj)
                    })
                    .unwrap();
                centers[c] = points[far].clone();
                labels[far] = c;
                changed = true;
            } else {
                for (dst, s) in centers[c].iter_mut().zip(&sums[c]) {
                    *dst = s / counts[c] as f64;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let inertia = points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &centers[l])).sum();
    KmeansRun { labels, inertia }
}

/// Runs k-means `restarts` times with derived seeds; returns every run in
/// order. Rows of `rows` are the points.
pub fn kmeans_restarts(rows: &DMatrix<f64>, k: usize, restarts: usize, seed: u64) -> Result<Vec<KmeansRun>> {
    let n = rows.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= {n} points, got k = {k}")));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let points: Vec<Vec<f64>> =
        (0..n).map(|i| rows.row(i).iter().copied().collect()).collect();
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..restarts)
        .map(|_| {
            let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
            lloyd(&points, k, &mut rng)
        })
        .collect())
}

/// Best-inertia labels over `restarts` k-means runs.
pub fn kmeans(rows: &DMatrix<f64>, k: usize, restarts: usize, seed: u64) -> Result<Vec<usize>> {
    let runs = kmeans_restarts(rows, k, restarts, seed)?;
    Ok(runs
        .into_iter()
        .min_by(|a, b| a.inertia.total_cmp(&b.inertia))
        .expect("at least one restart")
        .labels)
}

fn contingency(a: &[usize], b: &[usize]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let remap = |xs: &[usize]| -> Vec<usize> {
        let ids: BTreeMap<usize, usize> =
            xs.iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().zip(0..).map(|(v, i)| (v, i)).collect();
        xs.iter().map(|x| ids[x]).collect()
    };
    let a = remap(a);
    let b = remap(b);
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0.0; kb]; ka];
    for (&i, &j) in a.iter().zip(&b) {
        table[i][j] += 1.0;
    }
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<f64> = (0..kb).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    (table, row_sums, col_sums)
}

/// Normalized mutual information with square-root normalization and natural
/// logarithms. Zero entropy in either labeling yields 0 by convention.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("labelings have lengths {} and {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument("labelings are empty".into()));
    }
    let n = a.len() as f64;
    let (table, row_sums, col_sums) = contingency(a, b);
    let entropy = |sums: &[f64]| -> f64 {
        -sums
            .iter()
            .filter(|&&s| s > 0.0)
            .map(|&s| {
                let p = s / n;
                p * p.ln()
            })
            .sum::<f64>()
    };
    let ha = entropy(&row_sums);
    let hb = entropy(&col_sums);
    if ha <= 0.0 || hb <= 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0.0 {
                mi += (c / n) * ((c * n) / (row_sums[i] * col_sums[j])).ln();
            }
        }
    }
    Ok((mi / (ha * hb).sqrt()).clamp(0.0, 1.0))
}

/// Adjusted Rand index. Both partitions degenerate in the same way (zero
/// adjusted denominator) counts as perfect agreement.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("labelings have lengths {} and {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument("labelings are empty".into()));
    }
    let n = a.len() as f64;
    let (table, row_sums, col_sums) = contingency(a, b);
    let choose2 = |x: f64| x * (x - 1.0) / 2.0;
    let sum_cells: f64 = table.iter().flatten().map(|&c| choose2(c)).sum();
    let sum_rows: f64 = row_sums.iter().map(|&c| choose2(c)).sum();
    let sum_cols: f64 = col_sums.iter().map(|&c| choose2(c)).sum();
    let expected = sum_rows * sum_cols / choose2(n);
    let max_index = 0.5 * (sum_rows + sum_cols);
    let denom = max_index - expected;
    if denom.abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok((sum_cells - expected) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_frozen_values() {
        let a = [0, 0, 1, 1, 2, 2];
        assert!((nmi(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!((ari(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        // relabeling is invisible
        let b = [2, 2, 0, 0, 1, 1];
        assert!((nmi(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!((ari(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        // constant labeling has zero entropy
        let c = [0, 0, 0, 0, 0, 0];
        assert_eq!(nmi(&a, &c).unwrap(), 0.0);
    }

    #[test]
    fn ari_near_zero_for_independent_labelings() {
        // deterministic pseudo-random independent labelings
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let a: Vec<usize> = (0..3000).map(|_| rng.gen_range(0..3)).collect();
        let b: Vec<usize> = (0..3000).map(|_| rng.gen_range(0..3)).collect();
        assert!(ari(&a, &b).unwrap().abs() < 0.03);
        assert!(nmi(&a, &b).unwrap() < 0.02);
    }

    #[test]
    fn kmeans_separates_obvious_blobs() {
        // two tight blobs far apart in 1-D
        let mut vals = Vec::new();
        for i in 0..10 {
            vals.push(0.01 * i as f64);
        }
        for i in 0..10 {
            vals.push(100.0 + 0.01 * i as f64);
        }
        let rows = DMatrix::from_column_slice(20, 1, &vals);
        let labels = kmeans(&rows, 2, 5, 1).unwrap();
        assert!(labels[..10].iter().all(|&l| l == labels[0]));
        assert!(labels[10..].iter().all(|&l| l == labels[10]));
        assert_ne!(labels[0], labels[10]);
    }

    #[test]
    fn kmeans_is_deterministic_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rows = DMatrix::from_fn(50, 3, |_, _| rng.gen_range(-1.0..1.0));
        let a = kmeans(&rows, 4, 10, 77).unwrap();
        let b = kmeans(&rows, 4, 10, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kmeans_rejects_bad_k() {
        let rows = DMatrix::<f64>::zeros(3, 2);
        assert!(kmeans(&rows, 0, 1, 0).is_err());
        assert!(kmeans(&rows, 4, 1, 0).is_err());
    }
}
