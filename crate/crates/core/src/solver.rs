//! Variable-smoothing gradient descent in a chart.
//!
//! Each iteration minimizes the current surrogate (penalty replaced by its
//! Moreau envelope at index `mu_n`) one gradient step, then tightens the
//! index along the schedule. Because consecutive envelopes differ by at most
//! `(M/2)(mu_n - mu_{n+1}) L_g^2`, the per-step Armijo decrease survives the
//! surrogate swap up to that budget, which is summable enough to drive the
//! surrogate gradients to zero at rate `sqrt(1 / sum mu_k)`.

use crate::cayley::SkewParam;
use crate::composite::{CompositeProblem, LipschitzModel};
use crate::error::{Error, Result};
use crate::schedule::SmoothingSchedule;
use crate::trace::{SolverTrace, TerminationReason, TraceRecord};
use std::time::{Duration, Instant};

/// Sufficient-decrease line search parameters.
#[derive(Debug, Clone)]
pub struct ArmijoConfig {
    /// Sufficient-decrease fraction, in (0, 1).
    pub c: f64,
    /// Step shrink factor, in (0, 1).
    pub rho: f64,
    /// First step tried each iteration; `None` picks
    /// `min(1, 1 / ||grad||)` from the first iteration's gradient.
    pub gamma_initial: Option<f64>,
    /// Cap on objective evaluations per line search.
    pub max_trials: u32,
}

impl Default for ArmijoConfig {
    fn default() -> Self {
        // c = 2^-13 and rho = 1/2 are the benchmark settings used throughout.
        Self { c: 2f64.powi(-13), rho: 0.5, gamma_initial: None, max_trials: 60 }
    }
}

impl ArmijoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::InvalidArgument(format!("c must lie in (0,1), got {}", self.c)));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidArgument(format!("rho must lie in (0,1), got {}", self.rho)));
        }
        if let Some(g) = self.gamma_initial {
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::InvalidArgument(format!("gamma_initial must be positive, got {g}")));
            }
        }
        if self.max_trials == 0 {
            return Err(Error::InvalidArgument("max_trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// How the stepsize is chosen.
#[derive(Debug, Clone)]
pub enum StepMode {
    /// Backtracking until the Armijo inequality holds.
    Backtracking,
    /// Closed-form step `2 (1 - c) / L(mu)` from a Lipschitz model of the
    /// surrogate gradient; no function evaluations spent.
    Lipschitz(LipschitzModel),
}

/// When to stop.
#[derive(Debug, Clone)]
pub struct StoppingRule {
    pub max_iterations: usize,
    pub time_budget: Option<Duration>,
    pub grad_tolerance: Option<f64>,
}

impl StoppingRule {
    pub fn max_iterations(n: usize) -> Self {
        Self { max_iterations: n, time_budget: None, grad_tolerance: None }
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub armijo: ArmijoConfig,
    pub step_mode: StepMode,
    pub stop: StoppingRule,
    /// Keep a snapshot of every iterate in the trace (memory scales with the
    /// iteration count; meant for verification runs).
    pub record_iterates: bool,
    /// Evaluate the true (unsmoothed) objective every this many iterations;
    /// records in between carry the last evaluated value forward.
    pub true_value_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            armijo: ArmijoConfig::default(),
            step_mode: StepMode::Backtracking,
            stop: StoppingRule::max_iterations(1000),
            record_iterates: false,
            true_value_every: 1,
        }
    }
}

/// Backtracking line search along `-grad` from `v`: returns the accepted
/// step and the number of objective evaluations. `f_at_v` is the objective
/// at `v`; acceptance is
/// `f(v - gamma grad) <= f_at_v - c gamma ||grad||^2`.
pub fn backtrack(
    f: impl Fn(&SkewParam) -> Result<f64>,
    v: &SkewParam,
    f_at_v: f64,
    grad: &SkewParam,
    cfg: &ArmijoConfig,
    gamma_initial: f64,
) -> Result<(f64, u32)> {
    cfg.validate()?;
    let g2 = grad.inner(grad);
    if g2 == 0.0 {
        return Err(Error::InvalidArgument("backtracking needs a nonzero gradient".into()));
    }
    let mut gamma = gamma_initial;
    for k in 1..=cfg.max_trials {
        let mut trial = v.clone();
        trial.axpy(-gamma, grad);
        let ft = f(&trial)?;
        if ft <= f_at_v - cfg.c * gamma * g2 {
            return Ok((gamma, k));
        }
        gamma *= cfg.rho;
    }
    Err(Error::LineSearchFailure {
        trials: cfg.max_trials,
        f_value: f_at_v,
        grad_norm: g2.sqrt(),
        gamma_initial,
    })
}

/// Stepsize `2 (1 - c) / L(mu)` that satisfies the Armijo inequality
/// whenever `L(mu)` really bounds the surrogate's gradient Lipschitz
/// constant.
pub fn lipschitz_step(model: &LipschitzModel, mu: f64, c: f64) -> f64 {
    2.0 * (1.0 - c) / model.lipschitz(mu)
}

/// True when the sufficient decrease demanded at the first trial step is
/// below the floating-point resolution of the objective, so the Armijo test
/// compares rounding noise against rounding noise. A line-search failure
/// under this condition means the iterate is stationary to machine
/// precision, not that the search is broken.
///
/// `terms` is the number of scalar contributions summed into the objective
/// (the penalty's codomain entries plus the smooth part): summation noise
/// grows like sqrt(terms) times the ULP of the total, and the incumbent
/// value is selection-biased toward the noise minimum, so re-evaluations
/// near a stationary point read high by roughly that margin.
pub(crate) fn armijo_is_vacuous(
    c: f64,
    gamma_initial: f64,
    grad_norm: f64,
    f_value: f64,
    terms: usize,
) -> bool {
    let noise_floor =
        32.0 * f64::EPSILON * f_value.abs().max(1e-100) * (terms.max(1) as f64).sqrt();
    c * gamma_initial * grad_norm * grad_norm <= noise_floor
}

/// Runs variable-smoothing gradient descent from `v0`.
///
/// The schedule's weak-convexity modulus must dominate the penalty's
/// (`schedule.eta() >= g.eta()`), so every `mu_n` keeps the proximal
/// subproblem strongly convex.
pub fn vsmooth_run(
    problem: &CompositeProblem,
    v0: &SkewParam,
    schedule: &SmoothingSchedule,
    opts: &SolverOptions,
) -> Result<SolverTrace> {
    opts.armijo.validate()?;
    if schedule.eta() + 1e-12 < problem.g.eta() {
        return Err(Error::InvalidArgument(format!(
            "schedule modulus {} is below the penalty's weak-convexity modulus {}",
            schedule.eta(),
            problem.g.eta()
        )));
    }
    if v0.n() != problem.chart.n() || v0.p() != problem.chart.p() {
        return Err(Error::Dimension(format!(
            "initial parameter is {}x{}, chart expects {}x{}",
            v0.n(),
            v0.p(),
            problem.chart.n(),
            problem.chart.p()
        )));
    }
    if opts.true_value_every == 0 {
        return Err(Error::InvalidArgument("true_value_every must be at least 1".into()));
    }

    let start = Instant::now();
    let mut v = v0.clone();
    let mut records: Vec<TraceRecord> = Vec::new();
    let mut iterates: Option<Vec<SkewParam>> = opts.record_iterates.then(Vec::new);
    let mut gamma_initial = opts.armijo.gamma_initial;
    let mut termination = TerminationReason::MaxIterations;
    let mut last_true_value = f64::NAN;
    let objective_terms =
        problem.s_map.codomain_entries(problem.chart.n(), problem.chart.p()) + 1;

    if opts.stop.max_iterations == 0 {
        // degenerate run: report the initial point and stop
        let mu = schedule.mu_at(1);
        let u = problem.to_stiefel(&v);
        let grad = problem.surrogate_grad(&v, mu)?;
        records.push(TraceRecord {
            n: 0,
            mu,
            gamma: 0.0,
            grad_norm: grad.norm(),
            surrogate_value: problem.ambient_smoothed_value(&u, mu)?,
            true_value: problem.ambient_value(&u),
            elapsed_s: start.elapsed().as_secs_f64(),
            bt_count: 0,
        });
        if let Some(snaps) = iterates.as_mut() {
            snaps.push(v.clone());
        }
    }

    for n in 1..=opts.stop.max_iterations {
        if let Some(budget) = opts.stop.time_budget {
            if start.elapsed() >= budget {
                termination = TerminationReason::TimeBudget;
                break;
            }
        }
        let mu = schedule.mu_at(n);
        let u = problem.to_stiefel(&v);
        let f_sur = problem.ambient_smoothed_value(&u, mu)?;
        let ambient_grad = problem.ambient_smoothed_grad(&u, mu)?;
        let grad = problem.chart.adjoint_differential(&v, &ambient_grad);
        let grad_norm = grad.norm();
        if !f_sur.is_finite() || !grad_norm.is_finite() {
            return Err(Error::NumericalFailure {
                iteration: n,
                what: format!("surrogate value {f_sur}, gradient norm {grad_norm}"),
            });
        }
        if (n == 1 || opts.true_value_every == 1 || n % opts.true_value_every == 0)
            || opts.stop.max_iterations == n
        {
            last_true_value = problem.ambient_value(&u);
        }

        let stationary = grad_norm == 0.0;
        let tol_hit = opts.stop.grad_tolerance.is_some_and(|tol| grad_norm <= tol);
        if stationary || tol_hit {
            records.push(TraceRecord {
                n,
                mu,
                gamma: 0.0,
                grad_norm,
                surrogate_value: f_sur,
                true_value: last_true_value,
                elapsed_s: start.elapsed().as_secs_f64(),
                bt_count: 0,
            });
            if let Some(snaps) = iterates.as_mut() {
                snaps.push(v.clone());
            }
            termination =
                if tol_hit { TerminationReason::GradTolerance } else { TerminationReason::ZeroGradient };
            break;
        }

        let gamma_init = *gamma_initial.get_or_insert_with(|| (1.0 / grad_norm).min(1.0));
        let (gamma, bt_count) = match &opts.step_mode {
            StepMode::Backtracking => {
                match backtrack(
                    |trial| problem.surrogate_value(trial, mu),
                    &v,
                    f_sur,
                    &grad,
                    &opts.armijo,
                    gamma_init,
                ) {
                    Ok(step) => step,
                    Err(Error::LineSearchFailure { trials, .. })
                        if armijo_is_vacuous(
                            opts.armijo.c,
                            gamma_init,
                            grad_norm,
                            f_sur,
                            objective_terms,
                        ) =>
                    {
                        records.push(TraceRecord {
                            n,
                            mu,
                            gamma: 0.0,
                            grad_norm,
                            surrogate_value: f_sur,
                            true_value: last_true_value,
                            elapsed_s: start.elapsed().as_secs_f64(),
                            bt_count: trials,
                        });
                        if let Some(snaps) = iterates.as_mut() {
                            snaps.push(v.clone());
                        }
                        termination = TerminationReason::LineSearchStall;
                        break;
                    }
                    Err(other) => return Err(other),
                }
            }
            StepMode::Lipschitz(model) => (lipschitz_step(model, mu, opts.armijo.c), 0),
        };

        if let Some(snaps) = iterates.as_mut() {
            snaps.push(v.clone());
        }
        v.axpy(-gamma, &grad);
        if !v.is_finite() {
            return Err(Error::NumericalFailure { iteration: n, what: "iterate left the finite range".into() });
        }
        records.push(TraceRecord {
            n,
            mu,
            gamma,
            grad_norm,
            surrogate_value: f_sur,
            true_value: last_true_value,
            elapsed_s: start.elapsed().as_secs_f64(),
            bt_count,
        });
    }

    let final_point = problem.to_stiefel(&v);
    if let Some(snaps) = iterates.as_mut() {
        snaps.push(v.clone());
    }
    Ok(SolverTrace {
        records,
        termination,
        final_param: Some(v),
        final_point,
        iterates,
    })
}
