//! Fast property suites runnable from the shipped binary.
//!
//! Each suite re-derives a core contract from an independent direction:
//! proximal points against a grid scan, gradients against central
//! differences, chart bounds against random probes, the solver's descent
//! certificate against its own trace. A release build that passes `selftest`
//! has its numerics wired correctly end to end; the full acceptance suite in
//! the test tree runs the same checks at paper scale.

use crate::baselines::{rsmooth_run, rsub_run};
use crate::cayley::{CayleyChart, SkewParam};
use crate::cluster::{ari, nmi};
use crate::composite::CompositeProblem;
use crate::oracle::{central_diff, prox_oracle};
use crate::prox::WeaklyConvexFunction;
use crate::schedule::SmoothingSchedule;
use crate::solver::{vsmooth_run, ArmijoConfig, SolverOptions, StoppingRule};
use crate::spca::{generate_spca, spca_problem};
use crate::ssc::{generate_blobs, knn_affinity, sc_embed, ssc_problem, Bandwidth};
use crate::stiefel::{feasibility, polar_retract, random_stiefel, tangent_project};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// Empty on success, first failure otherwise.
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

type Check = fn() -> Result<(), String>;

/// Runs every suite, timing each; failures become report content, not
/// errors.
pub fn run_selftest() -> SelftestReport {
    let suites: &[(&'static str, Check)] = &[
        ("prox_grid_oracle", check_prox_grid_oracle),
        ("moreau_envelope", check_moreau_envelope),
        ("chart_roundtrip", check_chart_roundtrip),
        ("chart_differential_bounds", check_chart_bounds),
        ("surrogate_gradients", check_surrogate_gradients),
        ("descent_certificate", check_descent_certificate),
        ("stiefel_primitives", check_stiefel_primitives),
        ("baselines", check_baselines),
        ("clustering_metrics", check_clustering_metrics),
    ];
    let mut results = Vec::with_capacity(suites.len());
    for (name, f) in suites {
        let start = Instant::now();
        let outcome = f();
        results.push(SuiteResult {
            name,
            passed: outcome.is_ok(),
            detail: outcome.err().unwrap_or_default(),
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    SelftestReport { suites: results }
}

fn fail(msg: String) -> Result<(), String> {
    Err(msg)
}

fn check_prox_grid_oracle() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let l1 = WeaklyConvexFunction::l1(0.5).map_err(|e| e.to_string())?;
    let mcp = WeaklyConvexFunction::mcp(1.0, 1.5).map_err(|e| e.to_string())?;
    for _ in 0..40 {
        let z = rng.gen_range(-4.0..4.0);
        for mu in [1e-2, 1e-1] {
            let got = l1.prox(&[z], mu).map_err(|e| e.to_string())?[0];
            let want = prox_oracle(|x| 0.5 * x.abs(), mu, z);
            if (got - want).abs() > 1e-5 {
                return fail(format!("l1 prox at z = {z}, mu = {mu}: {got} vs oracle {want}"));
            }
            let got = mcp.prox(&[z], mu).map_err(|e| e.to_string())?[0];
            let pen = |x: f64| {
                let a = x.abs();
                if a <= 1.5 { a - x * x / 3.0 } else { 0.75 }
            };
            let want = prox_oracle(pen, mu, z);
            if (got - want).abs() > 1e-5 {
                return fail(format!("mcp prox at z = {z}, mu = {mu}: {got} vs oracle {want}"));
            }
        }
    }
    Ok(())
}

fn check_moreau_envelope() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let gs = [
        WeaklyConvexFunction::l1(1.0).map_err(|e| e.to_string())?,
        WeaklyConvexFunction::mcp(0.8, 1.2).map_err(|e| e.to_string())?,
    ];
    for g in &gs {
        let lg = g.lipschitz_per_entry();
        for _ in 0..60 {
            let z = [rng.gen_range(-4.0..4.0)];
            let mu1 = rng.gen_range(0.05..0.6);
            let mu2 = rng.gen_range(0.01..mu1);
            if g.check_index(mu1).is_err() {
                continue;
            }
            let e1 = g.moreau_value(&z, mu1).map_err(|e| e.to_string())?;
            let e2 = g.moreau_value(&z, mu2).map_err(|e| e.to_string())?;
            let gv = g.value(&z);
            if !(e1 <= gv + 1e-10 && gv <= e1 + mu1 * lg * lg / 2.0 + 1e-10) {
                return fail(format!("sandwich violated at z = {}, mu = {mu1}", z[0]));
            }
            if !(e1 <= e2 + 1e-10 && e2 <= e1 + 0.5 * ((mu1 - mu2) / mu2) * mu1 * lg * lg + 1e-10) {
                return fail(format!("index monotonicity violated at z = {}", z[0]));
            }
            let gr = g.moreau_grad(&z, mu1).map_err(|e| e.to_string())?[0];
            if gr.abs() > lg + 1e-10 {
                return fail(format!("gradient bound violated: |{gr}| > {lg}"));
            }
            let fd = central_diff(|x| g.moreau_value(&[x], mu1).unwrap(), z[0], 1e-6);
            if (gr - fd).abs() > 1e-6 * gr.abs().max(1.0) {
                return fail(format!("envelope gradient vs differences: {gr} vs {fd}"));
            }
        }
    }
    Ok(())
}

fn check_chart_roundtrip() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for (n, p) in [(8, 3), (6, 2)] {
        let anchor = random_stiefel(n, p, &mut rng).map_err(|e| e.to_string())?;
        let (chart, v0) = CayleyChart::from_anchor(&anchor).map_err(|e| e.to_string())?;
        if (chart.inverse(&v0) - &anchor).norm() > 1e-10 {
            return fail(format!("anchor round trip failed at ({n},{p})"));
        }
        for _ in 0..20 {
            let v = SkewParam::random(n, p, 1.5, &mut rng).map_err(|e| e.to_string())?;
            let u = chart.inverse(&v);
            if feasibility(&u) > 1e-12 {
                return fail(format!("image not orthonormal at ({n},{p})"));
            }
            let back = chart.forward(&u).map_err(|e| e.to_string())?;
            let mut diff = back.clone();
            diff.axpy(-1.0, &v);
            if diff.norm() > 1e-10 {
                return fail(format!("round trip residual {} at ({n},{p})", diff.norm()));
            }
        }
    }
    Ok(())
}

fn check_chart_bounds() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let (n, p) = (7, 2);
    let chart = CayleyChart::identity(n, p).map_err(|e| e.to_string())?;
    for _ in 0..30 {
        let v1 = SkewParam::random(n, p, 2.0, &mut rng).map_err(|e| e.to_string())?;
        let v2 = SkewParam::random(n, p, 2.0, &mut rng).map_err(|e| e.to_string())?;
        let d = SkewParam::random(n, p, 1.0, &mut rng).map_err(|e| e.to_string())?;
        let dn = d.norm();
        if chart.differential(&v1, &d).norm() > 2.0 * dn + 1e-8 {
            return fail("differential operator norm above 2".into());
        }
        let gap = (chart.differential(&v1, &d) - chart.differential(&v2, &d)).norm();
        let mut dv = v1.clone();
        dv.axpy(-1.0, &v2);
        if gap > 4.0 * dv.norm() * dn + 1e-8 {
            return fail("differential Lipschitz bound above 4".into());
        }
    }
    Ok(())
}

fn surrogate_fd_check(problem: &CompositeProblem, v: &SkewParam, mu: f64, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let grad = problem.surrogate_grad(v, mu).map_err(|e| e.to_string())?;
    let d = SkewParam::random(v.n(), v.p(), 1.0, rng).map_err(|e| e.to_string())?;
    let h = 1e-6;
    let mut vp = v.clone();
    vp.axpy(h, &d);
    let mut vm = v.clone();
    vm.axpy(-h, &d);
    let fd = (problem.surrogate_value(&vp, mu).map_err(|e| e.to_string())?
        - problem.surrogate_value(&vm, mu).map_err(|e| e.to_string())?)
        / (2.0 * h);
    let an = grad.inner(&d);
    if (fd - an).abs() > 1e-5 * an.abs().max(1.0) {
        return fail(format!("surrogate gradient vs differences: {an} vs {fd}"));
    }
    Ok(())
}

fn check_surrogate_gradients() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    // sparse PCA shape
    let inst = generate_spca(8, 3, 40, 1, 0.1).map_err(|e| e.to_string())?;
    let u0 = random_stiefel(8, 3, &mut rng).map_err(|e| e.to_string())?;
    let (problem, v0) = spca_problem(&inst, &u0).map_err(|e| e.to_string())?;
    for _ in 0..10 {
        let mut v = v0.clone();
        let jitter = SkewParam::random(8, 3, 0.3, &mut rng).map_err(|e| e.to_string())?;
        v.axpy(1.0, &jitter);
        surrogate_fd_check(&problem, &v, rng.gen_range(0.02..0.3), &mut rng)?;
    }
    // spectral clustering shape (penalty through U U^T)
    let blobs = generate_blobs(5, 2, 2, 8.0, 3).map_err(|e| e.to_string())?;
    let graph = knn_affinity(&blobs.points, 3, Bandwidth::LocalScaling).map_err(|e| e.to_string())?;
    let anchor = sc_embed(&graph, 2).map_err(|e| e.to_string())?;
    let g = WeaklyConvexFunction::mcp(0.1, 0.5).map_err(|e| e.to_string())?;
    let (problem, v0) = ssc_problem(&graph, g, &anchor).map_err(|e| e.to_string())?;
    for _ in 0..10 {
        let mut v = v0.clone();
        let jitter = SkewParam::random(10, 2, 0.3, &mut rng).map_err(|e| e.to_string())?;
        v.axpy(1.0, &jitter);
        surrogate_fd_check(&problem, &v, rng.gen_range(0.05..0.4), &mut rng)?;
    }
    Ok(())
}

fn check_descent_certificate() -> Result<(), String> {
    let inst = generate_spca(20, 2, 60, 5, 0.1).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(127);
    let u0 = random_stiefel(20, 2, &mut rng).map_err(|e| e.to_string())?;
    let (problem, v0) = spca_problem(&inst, &u0).map_err(|e| e.to_string())?;
    let schedule = SmoothingSchedule::new(1.0, 3.0).map_err(|e| e.to_string())?;
    let opts = SolverOptions {
        stop: StoppingRule::max_iterations(150),
        record_iterates: true,
        ..Default::default()
    };
    let trace = vsmooth_run(&problem, &v0, &schedule, &opts).map_err(|e| e.to_string())?;
    let lg = problem.g_lipschitz_frob();
    let m = schedule.ratio_bound();
    for w in trace.records.windows(2) {
        let budget = 0.5 * m * (w[0].mu - w[1].mu) * lg * lg;
        if w[1].surrogate_value > w[0].surrogate_value + budget + 1e-9 {
            return fail(format!(
                "perturbed descent violated between n = {} and {}",
                w[0].n, w[1].n
            ));
        }
    }
    // re-verify each recorded step against the Armijo inequality
    let iterates = trace.iterates.as_ref().expect("recorded");
    let cfg = ArmijoConfig::default();
    for (j, r) in trace.records.iter().enumerate() {
        let v = &iterates[j];
        let grad = problem.surrogate_grad(v, r.mu).map_err(|e| e.to_string())?;
        let f0 = problem.surrogate_value(v, r.mu).map_err(|e| e.to_string())?;
        let mut trial = v.clone();
        trial.axpy(-r.gamma, &grad);
        let ft = problem.surrogate_value(&trial, r.mu).map_err(|e| e.to_string())?;
        if ft > f0 - cfg.c * r.gamma * grad.inner(&grad) + 1e-10 {
            return fail(format!("recorded step at n = {} fails the Armijo inequality", r.n));
        }
        let u = problem.to_stiefel(v);
        if feasibility(&u) > 1e-12 {
            return fail(format!("iterate at n = {} left the manifold", r.n));
        }
    }
    Ok(())
}

fn check_stiefel_primitives() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(131);
    let u = random_stiefel(9, 3, &mut rng).map_err(|e| e.to_string())?;
    let x = nalgebra::DMatrix::from_fn(9, 3, |_, _| rng.gen_range(-1.0..1.0));
    let d = tangent_project(&u, &x);
    let utd = u.transpose() * &d;
    if (&utd + utd.transpose()).norm() > 1e-12 {
        return fail("tangent projection missed the tangent space".into());
    }
    let r = polar_retract(&u, &d).map_err(|e| e.to_string())?;
    if feasibility(&r) > 1e-12 {
        return fail("retraction left the manifold".into());
    }
    Ok(())
}

fn check_baselines() -> Result<(), String> {
    let inst = generate_spca(15, 2, 50, 9, 0.1).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(137);
    let u0 = random_stiefel(15, 2, &mut rng).map_err(|e| e.to_string())?;
    let (problem, _) = spca_problem(&inst, &u0).map_err(|e| e.to_string())?;
    let stop = StoppingRule::max_iterations(100);
    let sub = rsub_run(&problem, &u0, 0.99, &stop).map_err(|e| e.to_string())?;
    if feasibility(&sub.final_point) > 1e-10 {
        return fail("subgradient baseline left the manifold".into());
    }
    if problem.ambient_value(&sub.final_point) >= problem.ambient_value(&u0) {
        return fail("subgradient baseline did not descend".into());
    }
    let schedule = SmoothingSchedule::new(1.0, 3.0).map_err(|e| e.to_string())?;
    let smo = rsmooth_run(&problem, &u0, &schedule, &ArmijoConfig::default(), &stop)
        .map_err(|e| e.to_string())?;
    if feasibility(&smo.final_point) > 1e-10 {
        return fail("smoothed baseline left the manifold".into());
    }
    if problem.ambient_value(&smo.final_point) >= problem.ambient_value(&u0) {
        return fail("smoothed baseline did not descend".into());
    }
    Ok(())
}

fn check_clustering_metrics() -> Result<(), String> {
    let a = [0usize, 0, 1, 1, 2, 2];
    let b = [2usize, 2, 0, 0, 1, 1];
    if (nmi(&a, &b).map_err(|e| e.to_string())? - 1.0).abs() > 1e-12 {
        return fail("relabeled partition should score NMI 1".into());
    }
    if (ari(&a, &b).map_err(|e| e.to_string())? - 1.0).abs() > 1e-12 {
        return fail("relabeled partition should score ARI 1".into());
    }
    let constant = [0usize; 6];
    if nmi(&a, &constant).map_err(|e| e.to_string())? != 0.0 {
        return fail("constant labeling should score NMI 0".into());
    }
    let blobs = generate_blobs(15, 3, 2, 12.0, 11).map_err(|e| e.to_string())?;
    let out = crate::ssc::ssc_run(
        &blobs,
        &crate::ssc::SscConfig { k_neighbors: 6, kmeans_restarts: 20, ..Default::default() },
    )
    .map_err(|e| e.to_string())?;
    if out.nmi_mean.unwrap_or(0.0) < 0.9 {
        return fail(format!("plain SC on separated blobs scored NMI {:?}", out.nmi_mean));
    }
    Ok(())
}
