//! Acceptance gate: eight end-to-end checks, one test each, with the
//! tolerances stated inline. Numeric claims are asserted; wall-clock budgets
//! are printed next to the measured runtime (visible with --nocapture) but
//! not asserted, since they depend on the host.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;
use vsmooth::cayley::{CayleyChart, SkewParam};
use vsmooth::oracle::prox_oracle;
use vsmooth::prox::WeaklyConvexFunction;
use vsmooth::schedule::SmoothingSchedule;
use vsmooth::solver::{vsmooth_run, ArmijoConfig, SolverOptions, StoppingRule};
use vsmooth::spca::{generate_spca, spca_problem};
use vsmooth::ssc::{
    generate_blobs, knn_affinity, sc_embed, ssc_problem, ssc_run, Bandwidth, Dataset, SscConfig,
};
use vsmooth::stiefel::{feasibility, random_stiefel};
use vsmooth::trace::SolverTrace;
use vsmooth::CompositeProblem;
use vsmooth_bench::config::{
    Algorithm, BlobsSection, Experiment, Method, RunConfig, SolverSection, SpcaSection, SscSection,
};

fn fresh_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vsmooth-acceptance-{}-{tag}", std::process::id()));
    if dir.exists() {
        std::fs::remove_dir_all(&dir).expect("clearing stale output dir");
    }
    dir
}

fn report(idx: usize, what: &str, t0: Instant, budget: &str) {
    println!("acceptance {idx} PASS  {what}  [{:.2} s, stated budget {budget}]", t0.elapsed().as_secs_f64());
}

// ---------------------------------------------------------------------------
// 1. Scalar prox and envelope against the brute-force grid oracle, plus the
//    envelope sandwich, index monotonicity, and the gradient bound.

#[test]
fn acceptance_1_prox_and_envelope_oracles() {
    let t0 = Instant::now();
    let cells = [
        WeaklyConvexFunction::l1(0.1).unwrap(),
        WeaklyConvexFunction::l1(1.0).unwrap(),
        WeaklyConvexFunction::mcp(0.1, 1.0).unwrap(),
        WeaklyConvexFunction::mcp(1.0, 0.5).unwrap(),
        // modulus 20: mu = 1e-1 falls outside the validity range and must be
        // filtered by the index check, not crash
        WeaklyConvexFunction::mcp(1.0, 0.05).unwrap(),
    ];
    let mus = [1e-3, 1e-2, 1e-1];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut scalars = 0usize;
    for g in &cells {
        let lg = g.lipschitz_per_entry();
        let pen = |x: f64| g.value(&[x]);
        let valid: Vec<f64> = mus.iter().copied().filter(|&mu| g.check_index(mu).is_ok()).collect();
        assert!(!valid.is_empty());
        for &mu in &valid {
            for _ in 0..1000 {
                let z = rng.gen_range(-3.0..3.0);
                let p_lib = g.prox(&[z], mu).unwrap()[0];
                let p_ref = prox_oracle(pen, mu, z);
                assert!(
                    (p_lib - p_ref).abs() <= 1e-5,
                    "prox mismatch at z = {z}, mu = {mu}: {p_lib} vs oracle {p_ref}"
                );
                let env = g.moreau_value(&[z], mu).unwrap();
                let gv = g.value(&[z]);
                assert!(env <= gv + 1e-10, "envelope above g at z = {z}, mu = {mu}");
                assert!(
                    gv <= env + 0.5 * mu * lg * lg + 1e-10,
                    "sandwich upper bound violated at z = {z}, mu = {mu}"
                );
                let gr = g.moreau_grad(&[z], mu).unwrap()[0];
                assert!(gr.abs() <= lg + 1e-10, "gradient bound violated: |{gr}| > {lg}");
                scalars += 1;
            }
        }
        // index monotonicity between every valid pair mu2 < mu1
        for i in 0..valid.len() {
            for j in 0..i {
                let (mu2, mu1) = (valid[j], valid[i]);
                for _ in 0..1000 {
                    let z = [rng.gen_range(-3.0..3.0)];
                    let e1 = g.moreau_value(&z, mu1).unwrap();
                    let e2 = g.moreau_value(&z, mu2).unwrap();
                    assert!(e1 <= e2 + 1e-10, "monotonicity violated at z = {}", z[0]);
                    assert!(
                        e2 <= e1 + 0.5 * ((mu1 - mu2) / mu2) * mu1 * lg * lg + 1e-10,
                        "monotone gap bound violated at z = {}",
                        z[0]
                    );
                    scalars += 1;
                }
            }
        }
    }
    report(1, &format!("prox/envelope oracle suite over {scalars} scalars"), t0, "10 s");
}

// ---------------------------------------------------------------------------
// 2. Full-coordinate central differences of the surrogate objective against
//    the analytic chart gradient, on both benchmark problem shapes.

fn fd_gradient(problem: &CompositeProblem, v: &SkewParam, mu: f64) -> SkewParam {
    let (n, p) = (v.n(), v.p());
    let h = 1e-6;
    let eval = |vv: &SkewParam| problem.surrogate_value(vv, mu).unwrap();
    let diff_along = |e: &SkewParam| {
        let mut vp = v.clone();
        vp.axpy(h, e);
        let mut vm = v.clone();
        vm.axpy(-h, e);
        (eval(&vp) - eval(&vm)) / (2.0 * h)
    };
    // the parameter metric is <A1,A2> + 2 <B1,B2>, so a unit basis move in
    // A[(i,j)] (with the skew mirror) has squared norm 2, as does one in
    // B[(r,c)]; both metric factors resolve to "half the directional slope"
    let mut ga = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let mut ea = DMatrix::zeros(p, p);
            ea[(i, j)] = 1.0;
            ea[(j, i)] = -1.0;
            let e = SkewParam::new(ea, DMatrix::zeros(n - p, p)).unwrap();
            let d = diff_along(&e);
            ga[(i, j)] = d / 2.0;
            ga[(j, i)] = -d / 2.0;
        }
    }
    let mut gb = DMatrix::zeros(n - p, p);
    for r in 0..(n - p) {
        for c in 0..p {
            let mut eb = DMatrix::zeros(n - p, p);
            eb[(r, c)] = 1.0;
            let e = SkewParam::new(DMatrix::zeros(p, p), eb).unwrap();
            gb[(r, c)] = diff_along(&e) / 2.0;
        }
    }
    SkewParam::new(ga, gb).unwrap()
}

#[test]
fn acceptance_2_surrogate_gradient_consistency() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(311);

    let check = |problem: &CompositeProblem, v0: &SkewParam, rng: &mut ChaCha8Rng, label: &str| {
        for k in 0..50 {
            let mut v = v0.clone();
            let jitter = SkewParam::random(v0.n(), v0.p(), 0.4, rng).unwrap();
            v.axpy(1.0, &jitter);
            let mu = rng.gen_range(0.02..0.3);
            let grad = problem.surrogate_grad(&v, mu).unwrap();
            let fd = fd_gradient(problem, &v, mu);
            let mut diff = fd.clone();
            diff.axpy(-1.0, &grad);
            let rel = diff.norm() / fd.norm().max(1.0);
            assert!(rel <= 1e-5, "{label} point {k}: gradient mismatch, relative error {rel:.3e}");
        }
    };

    let inst = generate_spca(8, 3, 200, 7, 0.1).unwrap();
    let u0 = random_stiefel(8, 3, &mut rng).unwrap();
    let (problem, v0) = spca_problem(&inst, &u0).unwrap();
    check(&problem, &v0, &mut rng, "sparse PCA (8,3)");

    let blobs = generate_blobs(5, 2, 2, 8.0, 3).unwrap();
    let graph = knn_affinity(&blobs.points, 3, Bandwidth::LocalScaling).unwrap();
    let anchor = sc_embed(&graph, 2).unwrap();
    let g = WeaklyConvexFunction::mcp(0.3, 0.8).unwrap();
    let (problem, v0) = ssc_problem(&graph, g, &anchor).unwrap();
    check(&problem, &v0, &mut rng, "clustering (10,2)");

    report(2, "surrogate gradient vs central differences, 50 points per shape", t0, "30 s");
}

// ---------------------------------------------------------------------------
// 3. Chart suite: both round-trip directions, differential vs differences,
//    and the sampled operator-norm / Lipschitz bounds.

#[test]
fn acceptance_3_chart_roundtrips_and_bounds() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(509);
    for (n, p) in [(6usize, 2usize), (20, 5)] {
        let anchor = random_stiefel(n, p, &mut rng).unwrap();
        let (chart, v0) = CayleyChart::from_anchor(&anchor).unwrap();
        assert!((chart.inverse(&v0) - &anchor).norm() <= 1e-10, "anchor image drifted");
        let mut skipped = 0usize;
        for _ in 0..200 {
            // parameter-side round trip
            let v = SkewParam::random(n, p, 1.5, &mut rng).unwrap();
            let u = chart.inverse(&v);
            assert!(feasibility(&u) <= 1e-10, "chart image not orthonormal at ({n},{p})");
            let back = chart.forward(&u).unwrap();
            let mut dv = back.clone();
            dv.axpy(-1.0, &v);
            assert!(dv.norm() <= 1e-10, "V round trip residual {} at ({n},{p})", dv.norm());

            // manifold-side round trip; a draw inside the singular set has
            // no parameter and is skipped
            let u2 = random_stiefel(n, p, &mut rng).unwrap();
            match chart.forward(&u2) {
                Ok(v2) => {
                    let err = (chart.inverse(&v2) - &u2).norm();
                    assert!(err <= 1e-10, "U round trip residual {err} at ({n},{p})");
                }
                Err(_) => skipped += 1,
            }

            // differential against central differences
            let d = SkewParam::random(n, p, 1.0, &mut rng).unwrap();
            let an = chart.differential(&v, &d);
            let h = 1e-6;
            let mut vp = v.clone();
            vp.axpy(h, &d);
            let mut vm = v.clone();
            vm.axpy(-h, &d);
            let fd = (chart.inverse(&vp) - chart.inverse(&vm)) / (2.0 * h);
            let err = (&fd - &an).norm();
            assert!(err <= 1e-6 * an.norm().max(1.0), "differential vs differences: {err:.3e}");

            // sampled operator-norm and Lipschitz bounds
            assert!(an.norm() <= 2.0 * d.norm() + 1e-8, "differential operator norm above 2");
            let w = SkewParam::random(n, p, 1.5, &mut rng).unwrap();
            let gap = (chart.differential(&v, &d) - chart.differential(&w, &d)).norm();
            let mut dvw = v.clone();
            dvw.axpy(-1.0, &w);
            assert!(
                gap <= 4.0 * dvw.norm() * d.norm() + 1e-8,
                "differential Lipschitz bound above 4"
            );
        }
        assert!(skipped <= 10, "{skipped}/200 manifold draws hit the singular set at ({n},{p})");
    }
    report(3, "chart round trips, differential, operator bounds at (6,2) and (20,5)", t0, "30 s");
}

// ---------------------------------------------------------------------------
// 4 + 5 share one 5000-iteration descent run on a (50,3) instance.

struct DescentRun {
    problem: CompositeProblem,
    schedule: SmoothingSchedule,
    trace: SolverTrace,
}

static DESCENT: OnceLock<DescentRun> = OnceLock::new();

fn descent_run() -> &'static DescentRun {
    DESCENT.get_or_init(|| {
        let inst = generate_spca(50, 3, 5000, 17, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let u0 = random_stiefel(50, 3, &mut rng).unwrap();
        let (problem, v0) = spca_problem(&inst, &u0).unwrap();
        let schedule = SmoothingSchedule::new(1.0, 3.0).unwrap();
        let opts = SolverOptions {
            stop: StoppingRule::max_iterations(5000),
            record_iterates: true,
            ..Default::default()
        };
        let trace = vsmooth_run(&problem, &v0, &schedule, &opts).unwrap();
        DescentRun { problem, schedule, trace }
    })
}

#[test]
fn acceptance_4_descent_certificate() {
    let t0 = Instant::now();
    let run = descent_run();
    let recs = &run.trace.records;
    assert!(recs.len() >= 2000, "run ended after {} iterations", recs.len());

    let lg = run.problem.g_lipschitz_frob();
    let m = run.schedule.ratio_bound();
    for w in recs.windows(2).take(1999) {
        let budget = 0.5 * m * (w[0].mu - w[1].mu) * lg * lg;
        assert!(
            w[1].surrogate_value <= w[0].surrogate_value + budget + 1e-9,
            "perturbed descent violated between n = {} and {}",
            w[0].n,
            w[1].n
        );
    }

    let iterates = run.trace.iterates.as_ref().expect("iterates recorded");
    let cfg = ArmijoConfig::default();
    for (j, r) in recs.iter().take(2000).enumerate() {
        let v = &iterates[j];
        assert!(
            feasibility(&run.problem.to_stiefel(v)) <= 1e-12,
            "iterate image at n = {} not orthonormal",
            r.n
        );
        if r.gamma == 0.0 {
            continue; // terminal stall record carries no step
        }
        let grad = run.problem.surrogate_grad(v, r.mu).unwrap();
        let f0 = run.problem.surrogate_value(v, r.mu).unwrap();
        let mut trial = v.clone();
        trial.axpy(-r.gamma, &grad);
        let ft = run.problem.surrogate_value(&trial, r.mu).unwrap();
        assert!(
            ft <= f0 - cfg.c * r.gamma * grad.inner(&grad) + 1e-10,
            "recorded step at n = {} fails the sufficient-decrease inequality",
            r.n
        );
    }
    assert!(feasibility(&run.trace.final_point) <= 1e-12, "final image not orthonormal");
    report(4, "descent certificate over 2000 iterations at (50,3)", t0, "60 s");
}

#[test]
fn acceptance_5_rate_envelope() {
    let t0 = Instant::now();
    let run = descent_run();
    let recs = &run.trace.records;

    // fit the envelope constant on the first 10 iterations, then demand the
    // 1/sqrt(sum of indices) shape over the whole run
    let mut sum_mu = 0.0;
    let mut min_g = f64::INFINITY;
    let mut chi = 0.0f64;
    let mut running: Vec<(f64, f64)> = Vec::with_capacity(recs.len());
    for (idx, r) in recs.iter().enumerate() {
        sum_mu += r.mu;
        min_g = min_g.min(r.grad_norm);
        if idx < 10 {
            chi = chi.max(min_g * min_g * sum_mu);
        }
        running.push((min_g, sum_mu));
    }
    // The fit window can end mid-plateau: while the running minimum stands
    // still the bound keeps shrinking with the schedule sum, so the exact
    // window constant is overrun by sqrt(sum ratio) until the next
    // improvement (observed: 1.13x, dying out by n = 14). A 1.5 allowance on
    // the transient covers plateau extensions to ~3.4x the window under the
    // cube-root schedule; a broken rate overshoots by 5-10x at the far end.
    // Past the transient the exact constant must hold.
    for (idx, (mg, sm)) in running.iter().enumerate() {
        let bound = (chi / sm).sqrt();
        assert!(
            *mg <= 1.5 * bound,
            "rate envelope violated at n = {}: min grad {mg:.3e} > 1.5 x {bound:.3e}",
            idx + 1
        );
        if idx + 1 >= 20 {
            assert!(
                *mg <= bound * (1.0 + 1e-9),
                "rate envelope violated at n = {}: min grad {mg:.3e} > {bound:.3e}",
                idx + 1
            );
        }
    }
    let mut transient = (1.0f64, 0usize);
    for (idx, (mg, sm)) in running.iter().enumerate() {
        let ratio = mg / (chi / sm).sqrt();
        if ratio > 1.0 {
            transient = (transient.0.max(ratio), idx + 1);
        }
    }
    let final_min = running.last().unwrap().0;
    assert!(final_min < 1e-2, "smallest gradient {final_min:.3e} never fell below 1e-2");
    report(
        5,
        &format!(
            "rate envelope over {} iterations (plateau transient {:.2}x through n = {}), \
             smallest gradient {final_min:.3e}",
            recs.len(),
            transient.0,
            transient.1
        ),
        t0,
        "(runs with 4)",
    );
}

// ---------------------------------------------------------------------------
// 6. Benchmark desk reproduction at (200,1): all three algorithms through the
//    real runner, distribution-level targets.

fn read_csv(path: &std::path::Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn acceptance_6_benchmark_desk_values() {
    let t0 = Instant::now();
    let out = fresh_dir("desk");
    let cfg = RunConfig {
        experiment: Experiment::Spca,
        output_dir: out.clone(),
        seeds: (0..10).collect(),
        solver: SolverSection { max_iterations: 5000, ..Default::default() },
        spca: Some(SpcaSection {
            sizes: vec![[200, 1]],
            lambda: 0.1,
            num_samples: 5000,
            algorithms: vec![Algorithm::Vsmooth, Algorithm::Rsub, Algorithm::Rsmooth],
            time_budgets: None,
            rsub_step_base: 0.99,
        }),
        ssc: None,
    };
    cfg.validate().unwrap();
    vsmooth_bench::spca::run(&cfg, &out).unwrap();

    let rows = read_csv(&out.join("spca_summary.csv"));
    let row = |alg: &str| {
        rows.iter().find(|r| r[1] == alg).unwrap_or_else(|| panic!("no summary row for {alg}"))
    };
    let fval = |r: &[String]| r[2].parse::<f64>().unwrap();
    let vs = row("vsmooth");
    let vs_fval = fval(vs);
    let vs_feasi: f64 = vs[3].parse().unwrap();
    let vs_sparsity: f64 = vs[6].parse().unwrap();
    assert!(
        (0.085..=0.105).contains(&vs_fval),
        "mean objective {vs_fval:.4e} outside [0.085, 0.105]"
    );
    assert!(vs_sparsity >= 0.99, "mean sparsity {vs_sparsity} below 0.99");
    assert!(vs_feasi <= 1e-10, "mean feasibility {vs_feasi:.3e} above 1e-10");
    for alg in ["rsub", "rsmooth"] {
        let f = fval(row(alg));
        let rel = (f - vs_fval).abs() / vs_fval;
        assert!(rel <= 0.02, "{alg} mean objective {f:.4e} deviates {rel:.3}% from {vs_fval:.4e}");
    }
    report(
        6,
        &format!("desk benchmark (200,1), 10 seeds: objective {vs_fval:.4e}, sparsity {vs_sparsity:.3}"),
        t0,
        "5 min",
    );
}

// ---------------------------------------------------------------------------
// 7. Clustering sanity on well-separated blobs through the grid runner, plus
//    the soft (reported, unasserted) iris check.

#[test]
fn acceptance_7_clustering_sanity() {
    let t0 = Instant::now();
    let out = fresh_dir("blobs");
    let cfg = RunConfig {
        experiment: Experiment::Ssc,
        output_dir: out.clone(),
        seeds: Vec::new(),
        solver: SolverSection { max_iterations: 300, true_value_every: 50, ..Default::default() },
        spca: None,
        ssc: Some(SscSection {
            dataset: None,
            label_column: None,
            clusters: None,
            blobs: Some(BlobsSection {
                per_cluster: 50,
                clusters: 3,
                dim: 2,
                separation: 10.0,
                seed: 0,
            }),
            methods: vec![Method::SscMcp],
            grid: true,
            lambda: None,
            theta: None,
            k_neighbors: 10,
            bandwidth: None,
            kmeans_restarts: 100,
            kmeans_seed: 0,
        }),
    };
    cfg.validate().unwrap();
    vsmooth_bench::ssc::run(&cfg, &out).unwrap();

    let rows = read_csv(&out.join("ssc_summary.csv"));
    let row = rows.iter().find(|r| r[0] == "SSC+MCP").expect("summary row");
    let nmi: f64 = row[3].parse().unwrap();
    let ari: f64 = row[4].parse().unwrap();
    assert!(nmi >= 0.9, "grid-selected NMI {nmi} below 0.9");
    assert!(ari >= 0.9, "grid-selected ARI {ari} below 0.9");
    let blobs_elapsed = t0.elapsed().as_secs_f64();

    // soft check on the iris data: reported, never asserted, because the
    // affinity construction is only pinned up to reasonable convention
    let iris_path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/iris.csv");
    let iris = Dataset::from_csv(std::path::Path::new(iris_path), Some("label"), None).unwrap();
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for lambda in [1e-2, 1e-3, 1e-4] {
        for theta in [1.0, 1e-1] {
            let run_cfg = SscConfig {
                regularizer: Some(WeaklyConvexFunction::mcp(lambda, theta).unwrap()),
                solver: SolverOptions {
                    stop: StoppingRule::max_iterations(2000),
                    true_value_every: 100,
                    ..Default::default()
                },
                ..Default::default()
            };
            let Ok(outcome) = ssc_run(&iris, &run_cfg) else { continue };
            let (Some(nmi), Some(ari)) = (outcome.nmi_mean, outcome.ari_mean) else { continue };
            if best.is_none_or(|(s, ..)| (nmi + ari) / 2.0 > s) {
                best = Some(((nmi + ari) / 2.0, nmi, lambda, theta));
            }
        }
    }
    let (_, iris_nmi, bl, bt) = best.expect("every iris cell failed");
    let verdict = if (0.60..=0.90).contains(&iris_nmi) { "inside" } else { "OUTSIDE" };
    println!(
        "acceptance 7 note  iris soft check: best NMI {iris_nmi:.4} at lambda={bl}, theta={bt} \
         ({verdict} the expected band [0.60, 0.90]; reduced 3x2 grid, 2000 iterations)"
    );
    println!(
        "acceptance 7 PASS  blobs grid selection: NMI {nmi:.3}, ARI {ari:.3} \
         [{blobs_elapsed:.2} s, stated budget 2 min; iris adds {:.2} s]",
        t0.elapsed().as_secs_f64() - blobs_elapsed
    );
}

// ---------------------------------------------------------------------------
// 8. Byte-level determinism of summary outputs for iteration-bounded configs.

#[test]
fn acceptance_8_summary_determinism() {
    let t0 = Instant::now();

    let spca_cfg = |out: PathBuf| RunConfig {
        experiment: Experiment::Spca,
        output_dir: out,
        seeds: vec![0, 1],
        solver: SolverSection { max_iterations: 400, ..Default::default() },
        spca: Some(SpcaSection {
            sizes: vec![[200, 1]],
            lambda: 0.1,
            num_samples: 5000,
            algorithms: vec![Algorithm::Vsmooth],
            time_budgets: None,
            rsub_step_base: 0.99,
        }),
        ssc: None,
    };
    let (a, b) = (fresh_dir("det-spca-1"), fresh_dir("det-spca-2"));
    vsmooth_bench::spca::run(&spca_cfg(a.clone()), &a).unwrap();
    vsmooth_bench::spca::run(&spca_cfg(b.clone()), &b).unwrap();
    let bytes_a = std::fs::read(a.join("spca_summary.csv")).unwrap();
    let bytes_b = std::fs::read(b.join("spca_summary.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b, "spca summaries differ between identical runs");

    let ssc_cfg = |out: PathBuf| RunConfig {
        experiment: Experiment::Ssc,
        output_dir: out,
        seeds: Vec::new(),
        solver: SolverSection { max_iterations: 250, true_value_every: 50, ..Default::default() },
        spca: None,
        ssc: Some(SscSection {
            dataset: None,
            label_column: None,
            clusters: None,
            blobs: Some(BlobsSection {
                per_cluster: 20,
                clusters: 3,
                dim: 2,
                separation: 10.0,
                seed: 0,
            }),
            methods: vec![Method::Sc, Method::SscMcp],
            grid: false,
            lambda: Some(0.01),
            theta: Some(1.0),
            k_neighbors: 10,
            bandwidth: None,
            kmeans_restarts: 100,
            kmeans_seed: 0,
        }),
    };
    let (c, d) = (fresh_dir("det-ssc-1"), fresh_dir("det-ssc-2"));
    vsmooth_bench::ssc::run(&ssc_cfg(c.clone()), &c).unwrap();
    vsmooth_bench::ssc::run(&ssc_cfg(d.clone()), &d).unwrap();
    for file in ["ssc_summary.csv", "labels_sc.csv", "labels_ssc_mcp.csv"] {
        let bytes_c = std::fs::read(c.join(file)).unwrap();
        let bytes_d = std::fs::read(d.join(file)).unwrap();
        assert_eq!(bytes_c, bytes_d, "{file} differs between identical runs");
    }
    report(8, "byte-identical summaries across repeated runs", t0, "(untimed)");
}
