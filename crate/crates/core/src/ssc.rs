//! Sparse spectral clustering pipeline.
//!
//! Plain spectral clustering takes the K bottom eigenvectors of the
//! normalized graph Laplacian and k-means clusters their rows. The sparse
//! variant replaces the eigenvector computation by minimizing
//! `tr(U^T L U) + lambda psi(U U^T)` over the Stiefel manifold, pushing
//! entries of the affinity-like matrix `U U^T` toward zero so the embedding
//! separates clusters more cleanly before k-means runs.

use crate::cayley::{CayleyChart, SkewParam};
use crate::cluster::{kmeans_restarts, KmeansRun};
use crate::composite::{CompositeProblem, OuterProductMap, SmoothObjective};
use crate::error::{Error, Result};
use crate::prox::{PenaltyKind, WeaklyConvexFunction};
use crate::schedule::SmoothingSchedule;
use crate::solver::{vsmooth_run, SolverOptions};
use crate::trace::SolverTrace;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::io::BufRead;
use std::path::Path;

/// Points, optional ground-truth labels in `[0, k)`, and the cluster count.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub points: DMatrix<f64>,
    pub labels: Option<Vec<usize>>,
    pub k: usize,
}

impl Dataset {
    pub fn new(points: DMatrix<f64>, labels: Option<Vec<usize>>, k: usize) -> Result<Self> {
        if k == 0 || k > points.nrows() {
            return Err(Error::InvalidArgument(format!(
                "cluster count must lie in [1, {}], got {k}",
                points.nrows()
            )));
        }
        if let Some(ls) = &labels {
            if ls.len() != points.nrows() {
                return Err(Error::Dimension(format!(
                    "{} labels for {} points",
                    ls.len(),
                    points.nrows()
                )));
            }
            if let Some(&bad) = ls.iter().find(|&&l| l >= k) {
                return Err(Error::InvalidArgument(format!("label {bad} outside [0, {k})")));
            }
        }
        Ok(Self { points, labels, k })
    }

    /// Loads a CSV with a header row. All columns are numeric features
    /// except an optional label column named `label_column`, whose distinct
    /// values (sorted) become labels `0..k`. `k` may be given explicitly;
    /// otherwise it is the number of distinct labels.
    pub fn from_csv(path: &Path, label_column: Option<&str>, k: Option<usize>) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lines = file.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, message: "empty file".into() })?;
        let header = header?;
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        let label_idx = match label_column {
            Some(name) => Some(names.iter().position(|&h| h == name).ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("no column named '{name}' in header"),
            })?),
            None => None,
        };
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut raw_labels: Vec<i64> = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != names.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {} fields, got {}", names.len(), fields.len()),
                });
            }
            let mut row = Vec::with_capacity(names.len());
            for (j, field) in fields.iter().enumerate() {
                if Some(j) == label_idx {
                    let l: i64 = field.parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        message: format!("label '{field}' is not an integer"),
                    })?;
                    raw_labels.push(l);
                } else {
                    let x: f64 = field.parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        message: format!("field '{field}' is not a number"),
                    })?;
                    row.push(x);
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse { line: 2, message: "no data rows".into() });
        }
        let dim = rows[0].len();
        let points = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
        let labels = if label_idx.is_some() {
            let mut distinct: Vec<i64> = raw_labels.clone();
            distinct.sort_unstable();
            distinct.dedup();
            Some(
                raw_labels
                    .iter()
                    .map(|l| distinct.binary_search(l).expect("label seen above"))
                    .collect::<Vec<usize>>(),
            )
        } else {
            None
        };
        let k = match (k, &labels) {
            (Some(k), _) => k,
            (None, Some(ls)) => ls.iter().max().map_or(0, |m| m + 1),
            (None, None) => {
                return Err(Error::InvalidArgument(
                    "cluster count k is required when the file has no label column".into(),
                ))
            }
        };
        Self::new(points, labels, k)
    }
}

/// Synthetic Gaussian blobs: `k` unit-variance clusters of `per_cluster`
/// points in `dim` dimensions, centers pairwise `separation` apart (exactly,
/// for k <= 3; on a circle otherwise). Labeled.
pub fn generate_blobs(per_cluster: usize, k: usize, dim: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if dim < 2 || k == 0 || per_cluster == 0 {
        return Err(Error::InvalidArgument(format!(
            "need dim >= 2, k >= 1, per_cluster >= 1; got dim = {dim}, k = {k}, per_cluster = {per_cluster}"
        )));
    }
    let radius = if k == 1 { 0.0 } else { separation / (2.0 * (std::f64::consts::PI / k as f64).sin()) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = per_cluster * k;
    let mut points = DMatrix::zeros(n, dim);
    let mut labels = Vec::with_capacity(n);
    for c in 0..k {
        let angle = 2.0 * std::f64::consts::PI * c as f64 / k as f64;
        let (cx, cy) = (radius * angle.cos(), radius * angle.sin());
        for i in 0..per_cluster {
            let row = c * per_cluster + i;
            let noise = |r: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(r) };
            points[(row, 0)] = cx + noise(&mut rng);
            points[(row, 1)] = cy + noise(&mut rng);
            for j in 2..dim {
                points[(row, j)] = noise(&mut rng);
            }
            labels.push(c);
        }
    }
    Dataset::new(points, Some(labels), k)
}

/// Affinity, degrees, and normalized Laplacian of a mutual-or k-NN graph.
#[derive(Debug, Clone)]
pub struct GraphMatrices {
    pub affinity: DMatrix<f64>,
    pub degrees: DVector<f64>,
    pub laplacian: DMatrix<f64>,
}

/// Kernel bandwidth: per-point local scaling (distance to the
/// ceil(k/2)-th neighbor) or one global value.
#[derive(Debug, Clone, Copy)]
pub enum Bandwidth {
    LocalScaling,
    Global(f64),
}

/// Builds the symmetrized (union) k-nearest-neighbor affinity with Gaussian
/// weights `exp(-d_ij^2 / (2 s_i s_j))` and the normalized Laplacian
/// `I - D^{-1/2} W D^{-1/2}`.
pub fn knn_affinity(points: &DMatrix<f64>, k_neighbors: usize, bandwidth: Bandwidth) -> Result<GraphMatrices> {
    let n = points.nrows();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 points".into()));
    }
    if k_neighbors == 0 || k_neighbors >= n {
        return Err(Error::InvalidArgument(format!(
            "neighbor count must lie in [1, {}), got {k_neighbors}",
            n
        )));
    }
    // pairwise squared distances
    let mut d2 = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut s = 0.0;
            for c in 0..points.ncols() {
                let diff = points[(i, c)] - points[(j, c)];
                s += diff * diff;
            }
            d2[(i, j)] = s;
            d2[(j, i)] = s;
        }
    }
    // neighbor lists sorted by distance (self excluded)
    let mut neighbor_sets: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut sigma = vec![0.0; n];
    let local_rank = k_neighbors.div_ceil(2); // ceil(k/2)-th nearest, 1-indexed
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| d2[(i, a)].total_cmp(&d2[(i, b)]).then(a.cmp(&b)));
        sigma[i] = match bandwidth {
            Bandwidth::LocalScaling => d2[(i, order[local_rank - 1])].sqrt().max(1e-300),
            Bandwidth::Global(s) => {
                if !(s > 0.0) {
                    return Err(Error::InvalidArgument(format!("global bandwidth must be positive, got {s}")));
                }
                s
            }
        };
        order.truncate(k_neighbors);
        neighbor_sets.push(order);
    }
    // union symmetrization with Gaussian weights
    let mut w = DMatrix::zeros(n, n);
    for (i, neigh) in neighbor_sets.iter().enumerate() {
        for &j in neigh {
            // coincident points get the kernel's limit value 1 even when the
            // local scale underflows
            let weight =
                if d2[(i, j)] == 0.0 { 1.0 } else { (-d2[(i, j)] / (2.0 * sigma[i] * sigma[j])).exp() };
            w[(i, j)] = weight;
            w[(j, i)] = weight;
        }
    }
    for i in 0..n {
        w[(i, i)] = 0.0;
    }
    let degrees = DVector::from_fn(n, |i, _| w.row(i).sum());
    if let Some(i) = (0..n).find(|&i| degrees[i] <= 1e-300) {
        return Err(Error::IsolatedVertex { vertex: i, degree: degrees[i] });
    }
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut lap = DMatrix::from_fn(n, n, |i, j| -w[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
    for i in 0..n {
        lap[(i, i)] += 1.0;
    }
    // kill rounding asymmetry so the eigensolver sees an exactly symmetric matrix
    lap = (&lap + lap.transpose()) * 0.5;
    Ok(GraphMatrices { affinity: w, degrees, laplacian: lap })
}

/// The K eigenvectors of the Laplacian with smallest eigenvalues, as an
/// orthonormal N x K matrix.
pub fn sc_embed(graph: &GraphMatrices, k: usize) -> Result<DMatrix<f64>> {
    let n = graph.laplacian.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("embedding dimension must lie in [1, {n}], got {k}")));
    }
    let eig = graph.laplacian.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let mut u = DMatrix::zeros(n, k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        u.column_mut(col).copy_from(&eig.eigenvectors.column(idx));
    }
    let mut gram = u.transpose() * &u;
    for i in 0..k {
        gram[(i, i)] -= 1.0;
    }
    if gram.norm() > 1e-12 {
        // repeated eigenvalues can leave the block slightly oblique
        u = u.qr().q();
    }
    Ok(u)
}

struct LaplacianQuadratic {
    laplacian: DMatrix<f64>,
}

impl SmoothObjective for LaplacianQuadratic {
    fn value(&self, u: &DMatrix<f64>) -> f64 {
        (u.transpose() * &self.laplacian * u).trace()
    }

    fn gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        &self.laplacian * u * 2.0
    }
}

/// Builds the penalized spectral clustering problem
/// `tr(U^T L U) + g(U U^T)` in the chart anchored at `anchor`.
pub fn ssc_problem(
    graph: &GraphMatrices,
    g: WeaklyConvexFunction,
    anchor: &DMatrix<f64>,
) -> Result<(CompositeProblem, SkewParam)> {
    if anchor.nrows() != graph.laplacian.nrows() {
        return Err(Error::Dimension(format!(
            "anchor has {} rows, graph has {}",
            anchor.nrows(),
            graph.laplacian.nrows()
        )));
    }
    let (chart, v0) = CayleyChart::from_anchor(anchor)?;
    let problem = CompositeProblem {
        h: Box::new(LaplacianQuadratic { laplacian: graph.laplacian.clone() }),
        s_map: Box::new(OuterProductMap),
        g,
        chart,
    };
    Ok((problem, v0))
}

/// Normalizes each row to unit Euclidean norm.
pub fn row_normalize(u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut out = u.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        let norm = row.norm();
        if norm < 1e-12 {
            return Err(Error::DegenerateEmbedding { row: i, norm });
        }
        row /= norm;
    }
    Ok(out)
}

/// Pipeline configuration. `regularizer = None` runs plain spectral
/// clustering; otherwise the embedding is optimized by the chart solver
/// starting from the spectral one.
pub struct SscConfig {
    pub k_neighbors: usize,
    pub bandwidth: Bandwidth,
    pub regularizer: Option<WeaklyConvexFunction>,
    /// Weak-convexity modulus handed to the schedule; `None` picks 1 for the
    /// convex penalty and `1/theta` for MCP.
    pub schedule_eta: Option<f64>,
    pub schedule_alpha: f64,
    pub solver: SolverOptions,
    pub kmeans_restarts: usize,
    pub kmeans_seed: u64,
}

impl Default for SscConfig {
    fn default() -> Self {
        Self {
            k_neighbors: 10,
            bandwidth: Bandwidth::LocalScaling,
            regularizer: None,
            schedule_eta: None,
            schedule_alpha: 3.0,
            solver: SolverOptions::default(),
            kmeans_restarts: 100,
            kmeans_seed: 0,
        }
    }
}

/// Everything one pipeline run produces.
pub struct SscOutcome {
    /// Best-inertia labels over the k-means restarts.
    pub labels: Vec<usize>,
    /// Metric means over all restarts, when ground truth is available.
    pub nmi_mean: Option<f64>,
    pub ari_mean: Option<f64>,
    pub trace: Option<SolverTrace>,
    /// Row-normalized embedding the labels came from.
    pub embedding: DMatrix<f64>,
}

/// Default schedule modulus for a penalty: 1 for the convex one, `1/theta`
/// for MCP of width `theta`.
pub fn default_schedule_eta(g: &WeaklyConvexFunction) -> f64 {
    match g.kind() {
        PenaltyKind::L1 => 1.0,
        PenaltyKind::Mcp { theta } => 1.0 / theta,
    }
}

/// Runs the full pipeline on a dataset.
pub fn ssc_run(dataset: &Dataset, cfg: &SscConfig) -> Result<SscOutcome> {
    let graph = knn_affinity(&dataset.points, cfg.k_neighbors, cfg.bandwidth)?;
    let spectral = sc_embed(&graph, dataset.k)?;
    let (u_final, trace) = match &cfg.regularizer {
        None => (spectral, None),
        Some(g) => {
            let eta = cfg.schedule_eta.unwrap_or_else(|| default_schedule_eta(g)).max(g.eta());
            let schedule = SmoothingSchedule::new(eta, cfg.schedule_alpha)?;
            let (problem, v0) = ssc_problem(&graph, g.clone(), &spectral)?;
            let trace = vsmooth_run(&problem, &v0, &schedule, &cfg.solver)?;
            (trace.final_point.clone(), Some(trace))
        }
    };
    let rows = row_normalize(&u_final)?;
    let runs: Vec<KmeansRun> = kmeans_restarts(&rows, dataset.k, cfg.kmeans_restarts, cfg.kmeans_seed)?;
    let labels = runs
        .iter()
        .min_by(|a, b| a.inertia.total_cmp(&b.inertia))
        .expect("at least one restart")
        .labels
        .clone();
    let (nmi_mean, ari_mean) = match &dataset.labels {
        Some(truth) => {
            let mut nmi_sum = 0.0;
            let mut ari_sum = 0.0;
            for run in &runs {
                nmi_sum += crate::cluster::nmi(&run.labels, truth)?;
                ari_sum += crate::cluster::ari(&run.labels, truth)?;
            }
            let m = runs.len() as f64;
            (Some(nmi_sum / m), Some(ari_sum / m))
        }
        None => (None, None),
    };
    Ok(SscOutcome { labels, nmi_mean, ari_mean, trace, embedding: rows })
}
