//! Run configuration: a TOML file per experiment, with a handful of CLI
//! flags layered on top. The effective configuration (after overrides) is
//! echoed verbatim into the run manifest so every result directory is
//! self-describing.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Spca,
    Ssc,
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Experiment::Spca => write!(f, "spca"),
            Experiment::Ssc => write!(f, "ssc"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Vsmooth,
    Rsub,
    Rsmooth,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::Vsmooth => write!(f, "vsmooth"),
            Algorithm::Rsub => write!(f, "rsub"),
            Algorithm::Rsmooth => write!(f, "rsmooth"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sc,
    SscL1,
    SscMcp,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Sc => write!(f, "SC"),
            Method::SscL1 => write!(f, "SSC+L1"),
            Method::SscMcp => write!(f, "SSC+MCP"),
        }
    }
}

/// Solver knobs shared by both experiments. Defaults mirror the benchmark
/// setting: mu_n = (2 eta)^-1 n^(-1/3), c = 2^-13, rho = 1/2, and the first
/// trial step resolved from the initial gradient.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub alpha: f64,
    pub armijo_c: f64,
    pub armijo_rho: f64,
    pub max_iterations: usize,
    pub time_budget_s: Option<f64>,
    pub grad_tolerance: Option<f64>,
    /// Evaluate the unsmoothed objective every this many iterations.
    pub true_value_every: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            alpha: 3.0,
            armijo_c: 2f64.powi(-13),
            armijo_rho: 0.5,
            max_iterations: 10_000,
            time_budget_s: None,
            grad_tolerance: None,
            true_value_every: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpcaSection {
    /// Problem sizes as [N, p] pairs.
    pub sizes: Vec<[usize; 2]>,
    pub lambda: f64,
    #[serde(default = "default_num_samples")]
    pub num_samples: usize,
    pub algorithms: Vec<Algorithm>,
    /// Optional per-size wall-clock budgets in seconds (same order as
    /// `sizes`). When present they terminate runs and fill the summary's
    /// `time` column; without them runs are iteration-bounded and the
    /// summary stays byte-reproducible.
    #[serde(default)]
    pub time_budgets: Option<Vec<f64>>,
    #[serde(default = "default_rsub_base")]
    pub rsub_step_base: f64,
}

fn default_num_samples() -> usize {
    5000
}

fn default_rsub_base() -> f64 {
    0.99
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BlobsSection {
    pub per_cluster: usize,
    pub clusters: usize,
    pub dim: usize,
    pub separation: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SscSection {
    /// CSV dataset path; omit to use the synthetic `blobs` section instead.
    #[serde(default)]
    pub dataset: Option<PathBuf>,
    #[serde(default)]
    pub label_column: Option<String>,
    /// Cluster count, required when the dataset carries no labels.
    #[serde(default)]
    pub clusters: Option<usize>,
    #[serde(default)]
    pub blobs: Option<BlobsSection>,
    pub methods: Vec<Method>,
    /// Sweep lambda (and theta for MCP) over {10^-i : i = 0..6} and keep the
    /// cell with the best (NMI+ARI)/2. Requires ground-truth labels.
    #[serde(default)]
    pub grid: bool,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default = "default_k_neighbors")]
    pub k_neighbors: usize,
    /// Global Gaussian bandwidth; omit for per-point local scaling.
    #[serde(default)]
    pub bandwidth: Option<f64>,
    #[serde(default = "default_restarts")]
    pub kmeans_restarts: usize,
    #[serde(default)]
    pub kmeans_seed: u64,
}

fn default_k_neighbors() -> usize {
    10
}

fn default_restarts() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub spca: Option<SpcaSection>,
    #[serde(default)]
    pub ssc: Option<SscSection>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match self.experiment {
            Experiment::Spca => {
                let spca = self.spca.as_ref().context("spca experiment needs an [spca] section")?;
                if spca.sizes.is_empty() {
                    bail!("spca.sizes must not be empty");
                }
                if spca.algorithms.is_empty() {
                    bail!("spca.algorithms must not be empty");
                }
                if !(spca.lambda > 0.0) {
                    bail!("spca.lambda must be positive, got {}", spca.lambda);
                }
                if let Some(budgets) = &spca.time_budgets {
                    if budgets.len() != spca.sizes.len() {
                        bail!(
                            "spca.time_budgets has {} entries for {} sizes",
                            budgets.len(),
                            spca.sizes.len()
                        );
                    }
                }
                if self.seeds.is_empty() {
                    bail!("spca experiment needs a non-empty seeds list");
                }
            }
            Experiment::Ssc => {
                let ssc = self.ssc.as_ref().context("ssc experiment needs an [ssc] section")?;
                if ssc.methods.is_empty() {
                    bail!("ssc.methods must not be empty");
                }
                if ssc.dataset.is_none() && ssc.blobs.is_none() {
                    bail!("ssc needs either a dataset path or a [ssc.blobs] section");
                }
                if !ssc.grid {
                    let needs_lambda =
                        ssc.methods.iter().any(|m| matches!(m, Method::SscL1 | Method::SscMcp));
                    if needs_lambda && ssc.lambda.is_none() {
                        bail!("ssc.lambda is required when grid = false");
                    }
                    if ssc.methods.contains(&Method::SscMcp) && ssc.theta.is_none() {
                        bail!("ssc.theta is required for ssc_mcp when grid = false");
                    }
                }
            }
        }
        Ok(())
    }
}

/// Flag-level overrides applied on top of the file values.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seeds: Option<Vec<u64>>,
    pub time_budget_s: Option<f64>,
    pub dataset: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(self, cfg: &mut RunConfig) {
        if let Some(out) = self.out {
            cfg.output_dir = out;
        }
        if let Some(seeds) = self.seeds {
            cfg.seeds = seeds;
        }
        if let Some(budget) = self.time_budget_s {
            cfg.solver.time_budget_s = Some(budget);
        }
        if let Some(dataset) = self.dataset {
            if let Some(ssc) = cfg.ssc.as_mut() {
                ssc.dataset = Some(dataset);
            }
        }
    }
}
