//! Benchmark runner for variable-smoothing optimization on the Stiefel
//! manifold: sparse PCA and sparse spectral clustering experiments driven by
//! TOML configs, plus a numerical self-test of the library's property
//! suites.

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use vsmooth_bench::config::{Experiment, Overrides, RunConfig};
use vsmooth_bench::{spca, ssc};

#[derive(Parser)]
#[command(name = "vsmooth-bench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sparse PCA benchmark over random instances
    Spca(RunArgs),
    /// Sparse spectral clustering benchmark
    Ssc(SscArgs),
    /// Run the built-in numerical property suites and report per-suite status
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated seeds (overrides the config)
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Worker threads for independent cells (default: one per core)
    #[arg(long)]
    workers: Option<usize>,
    /// Wall-clock budget per solver run, seconds (overrides the config)
    #[arg(long)]
    time_budget: Option<f64>,
}

#[derive(Args)]
struct SscArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Dataset CSV (overrides the config)
    #[arg(long)]
    dataset: Option<PathBuf>,
}

fn prepare(args: &RunArgs, expected: Experiment, dataset: Option<PathBuf>) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&args.config)?;
    if cfg.experiment != expected {
        bail!(
            "config {} declares experiment '{}', but the '{}' subcommand was invoked",
            args.config.display(),
            cfg.experiment,
            expected
        );
    }
    Overrides {
        out: args.out.clone(),
        seeds: args.seeds.clone(),
        time_budget_s: args.time_budget,
        dataset,
    }
    .apply(&mut cfg);
    cfg.validate()?;
    if let Some(workers) = args.workers {
        rayon::ThreadPoolBuilder::new().num_threads(workers).build_global()?;
    }
    Ok(cfg)
}

fn selftest() -> i32 {
    let report = vsmooth::selftest::run_selftest();
    println!("{:<28} {:<8} {:>9}", "suite", "status", "seconds");
    for suite in &report.suites {
        println!(
            "{:<28} {:<8} {:>9.3}",
            suite.name,
            if suite.passed { "pass" } else { "FAIL" },
            suite.seconds
        );
        if !suite.passed {
            println!("  {}", suite.detail);
        }
    }
    let failed = report.suites.iter().filter(|s| !s.passed).count();
    if failed == 0 {
        println!("all {} suites passed", report.suites.len());
        0
    } else {
        println!("{failed} of {} suites FAILED", report.suites.len());
        1
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Selftest => selftest(),
        Command::Spca(args) => {
            let cfg = prepare(&args, Experiment::Spca, None)?;
            let out = cfg.output_dir.clone();
            spca::run(&cfg, &out)?;
            0
        }
        Command::Ssc(args) => {
            let cfg = prepare(&args.run, Experiment::Ssc, args.dataset.clone())?;
            let out = cfg.output_dir.clone();
            ssc::run(&cfg, &out)?;
            0
        }
    };
    std::process::exit(code);
}
