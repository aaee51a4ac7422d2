//! Sparse PCA benchmark: minimize `-tr(U^T Xi^T Xi U) + lambda ||U||_1`
//! over the Stiefel manifold, on synthetic Gaussian data.
//!
//! The data matrix has its columns shifted to zero mean and is scaled to unit
//! Frobenius norm, so objective values are comparable across sizes.

use crate::cayley::{CayleyChart, SkewParam};
use crate::composite::{CompositeProblem, IdentityMap, SmoothObjective};
use crate::error::{Error, Result};
use crate::prox::WeaklyConvexFunction;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// A generated sparse-PCA instance. `xi` is samples x variables; `gram`
/// caches `xi^T xi`.
#[derive(Debug, Clone)]
pub struct SpcaInstance {
    pub xi: DMatrix<f64>,
    pub gram: DMatrix<f64>,
    pub lambda: f64,
    pub n: usize,
    pub p: usize,
}

/// Draws a standard normal samples x `n` matrix, centers each column, and
/// scales to unit Frobenius norm.
pub fn generate_spca(
    n: usize,
    p: usize,
    num_samples: usize,
    seed: u64,
    lambda: f64,
) -> Result<SpcaInstance> {
    if n == 0 || p == 0 || p > n || num_samples < 2 {
        return Err(Error::Dimension(format!(
            "need 1 <= p <= n and at least 2 samples, got n = {n}, p = {p}, samples = {num_samples}"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xi = DMatrix::from_fn(num_samples, n, |_, _| StandardNormal.sample(&mut rng));
    SpcaInstance::from_data(&mut xi, n, p, lambda)
}

impl SpcaInstance {
    fn from_data(xi: &mut DMatrix<f64>, n: usize, p: usize, lambda: f64) -> Result<Self> {
        let rows = xi.nrows();
        for mut col in xi.column_iter_mut() {
            let mean = col.sum() / rows as f64;
            col.add_scalar_mut(-mean);
        }
        let norm = xi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("data matrix is identically zero".into()));
        }
        *xi /= norm;
        let gram = xi.transpose() * &*xi;
        Ok(Self { xi: xi.clone(), gram, lambda, n, p })
    }

    /// `h(U) = -tr(U^T Xi^T Xi U)` restricted to this instance.
    pub fn objective_value(&self, u: &DMatrix<f64>) -> f64 {
        -(u.transpose() * &self.gram * u).trace()
    }

    /// Full benchmark objective `h(U) + lambda ||U||_1`.
    pub fn full_value(&self, u: &DMatrix<f64>) -> f64 {
        self.objective_value(u) + self.lambda * u.iter().map(|x| x.abs()).sum::<f64>()
    }

    /// Writes `xi` as plain CSV, one data row per line.
    pub fn export_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for i in 0..self.xi.nrows() {
            let row: Vec<String> = (0..self.xi.ncols()).map(|j| format!("{}", self.xi[(i, j)])).collect();
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads a matrix written by [`export_csv`](Self::export_csv) back into
    /// an instance (re-centering and re-normalizing are idempotent).
    pub fn import_csv(path: &Path, p: usize, lambda: f64) -> Result<Self> {
        let f = BufReader::new(std::fs::File::open(path)?);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (idx, line) in f.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("expected {} fields, got {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.len() < 2 {
            return Err(Error::Parse { line: 0, message: "need at least 2 data rows".into() });
        }
        let n = rows[0].len();
        let mut xi = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        Self::from_data(&mut xi, n, p, lambda)
    }
}

struct SpcaObjective {
    gram: DMatrix<f64>,
}

impl SmoothObjective for SpcaObjective {
    fn value(&self, u: &DMatrix<f64>) -> f64 {
        -(u.transpose() * &self.gram * u).trace()
    }

    fn gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        &self.gram * u * -2.0
    }
}

/// Builds the composite problem for an instance, in the chart anchored at
/// `u0`. Returns the problem and the parameter mapping to `u0`.
pub fn spca_problem(instance: &SpcaInstance, u0: &DMatrix<f64>) -> Result<(CompositeProblem, SkewParam)> {
    if u0.nrows() != instance.n || u0.ncols() != instance.p {
        return Err(Error::Dimension(format!(
            "anchor is {}x{}, instance wants {}x{}",
            u0.nrows(),
            u0.ncols(),
            instance.n,
            instance.p
        )));
    }
    let (chart, v0) = CayleyChart::from_anchor(u0)?;
    let problem = CompositeProblem {
        h: Box::new(SpcaObjective { gram: instance.gram.clone() }),
        s_map: Box::new(IdentityMap),
        g: WeaklyConvexFunction::l1(instance.lambda)?,
        chart,
    };
    Ok((problem, v0))
}

/// Fraction of entries with magnitude below `tol`.
pub fn sparsity(u: &DMatrix<f64>, tol: f64) -> f64 {
    let small = u.iter().filter(|x| x.abs() < tol).count();
    small as f64 / (u.nrows() * u.ncols()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::directional_diff;
    use crate::stiefel::random_stiefel;
    use rand::{Rng, SeedableRng};

    #[test]
    fn generated_data_is_centered_and_normalized() {
        let inst = generate_spca(20, 2, 100, 42, 0.1).unwrap();
        for col in inst.xi.column_iter() {
            assert!(col.sum().abs() / 100.0 < 1e-12);
        }
        assert!((inst.xi.norm() - 1.0).abs() < 1e-12);
        assert_eq!(inst.gram.nrows(), 20);
        // same seed reproduces, different seed does not
        let again = generate_spca(20, 2, 100, 42, 0.1).unwrap();
        assert_eq!(inst.xi, again.xi);
        let other = generate_spca(20, 2, 100, 43, 0.1).unwrap();
        assert_ne!(inst.xi, other.xi);
    }

    #[test]
    fn spca_gradient_matches_finite_differences() {
        let inst = generate_spca(10, 2, 60, 7, 0.1).unwrap();
        let obj = SpcaObjective { gram: inst.gram.clone() };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_stiefel(10, 2, &mut rng).unwrap();
        let grad = obj.gradient(&u);
        for _ in 0..6 {
            let d = DMatrix::from_fn(10, 2, |_, _| rng.gen_range(-1.0..1.0));
            let fd = directional_diff(|x| obj.value(x), &u, &d, 1e-6);
            let an = grad.dot(&d);
            assert!((fd - an).abs() < 1e-7 * an.abs().max(1.0));
        }
    }

    #[test]
    fn sparsity_counts_small_entries() {
        let u = DMatrix::from_column_slice(2, 2, &[1e-6, 0.5, -1e-5, 0.2]);
        assert!((sparsity(&u, 1e-4) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn export_import_roundtrip() {
        let inst = generate_spca(6, 2, 30, 5, 0.2).unwrap();
        let dir = std::env::temp_dir().join("vsmooth_spca_roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("xi.csv");
        inst.export_csv(&path).unwrap();
        let back = SpcaInstance::import_csv(&path, 2, 0.2).unwrap();
        assert!((inst.xi.clone() - back.xi).norm() < 1e-12);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn problem_anchor_roundtrip() {
        let inst = generate_spca(12, 3, 50, 3, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u0 = random_stiefel(12, 3, &mut rng).unwrap();
        let (problem, v0) = spca_problem(&inst, &u0).unwrap();
        assert!((problem.to_stiefel(&v0) - &u0).norm() < 1e-10);
        // surrogate value approaches the true value as mu vanishes
        let t = problem.true_value(&v0);
        let s = problem.surrogate_value(&v0, 1e-8).unwrap();
        assert!((t - s).abs() < 1e-6);
    }
}
