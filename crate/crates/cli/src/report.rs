//! Result-directory plumbing: summary CSV formatting and the run manifest.
//!
//! Summary files must be byte-identical across repeated runs with the same
//! config and seeds, so every float they carry is printed with Rust's
//! shortest round-trip formatting and all rows follow config order. Measured
//! wall times are deliberately kept out of the summaries; they live in the
//! manifest and in the per-run trace files.

use crate::config::RunConfig;
use anyhow::{Context, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

/// Shortest round-trip decimal for a float; `na` for absent values.
pub fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v}"),
        None => "na".to_string(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellTiming {
    pub name: String,
    pub seconds: f64,
}

#[derive(Serialize)]
struct Timing {
    total_s: f64,
    cells: Vec<CellTiming>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: String,
    notes: BTreeMap<&'static str, String>,
    config: &'a RunConfig,
    timing: Timing,
}

/// Echoes the effective configuration and the measured wall times next to
/// the results, so a result directory explains itself.
pub fn write_manifest(
    out: &Path,
    cfg: &RunConfig,
    notes: BTreeMap<&'static str, String>,
    mut cells: Vec<CellTiming>,
    total_s: f64,
) -> Result<()> {
    cells.sort_by(|a, b| a.name.cmp(&b.name));
    let manifest = Manifest {
        tool: format!("vsmooth-bench {}", env!("CARGO_PKG_VERSION")),
        notes,
        config: cfg,
        timing: Timing { total_s, cells },
    };
    let text = toml::to_string_pretty(&manifest).context("serializing run manifest")?;
    let path = out.join("manifest.toml");
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
