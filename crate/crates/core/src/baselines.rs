//! Retraction-based baselines: Riemannian subgradient descent and
//! Riemannian gradient descent on the smoothed objective.
//!
//! Both work directly on the manifold through the polar retraction, so their
//! iterates are feasible up to rounding but carry no chart parameter. Their
//! traces reuse the common record layout: the subgradient method has no
//! smoothing index and no surrogate, so those columns carry 0 and the true
//! objective value.

use crate::composite::CompositeProblem;
use crate::error::{Error, Result};
use crate::schedule::SmoothingSchedule;
use crate::solver::{ArmijoConfig, StoppingRule};
use crate::stiefel::{polar_retract, tangent_project};
use crate::trace::{SolverTrace, TerminationReason, TraceRecord};
use nalgebra::DMatrix;
use std::time::Instant;

fn require_identity_map(problem: &CompositeProblem, who: &str) -> Result<()> {
    if !problem.s_map.is_identity() {
        return Err(Error::UnsupportedProblem(format!(
            "{who} needs the penalty applied directly to U (identity inner map)"
        )));
    }
    Ok(())
}

/// Riemannian subgradient descent with geometrically decaying steps
/// `gamma_n = base^n`: the direction is the negative tangent projection of a
/// subgradient of `h + g`, followed by a polar retraction.
pub fn rsub_run(
    problem: &CompositeProblem,
    u0: &DMatrix<f64>,
    step_base: f64,
    stop: &StoppingRule,
) -> Result<SolverTrace> {
    require_identity_map(problem, "the subgradient baseline")?;
    if !(step_base > 0.0 && step_base < 1.0) {
        return Err(Error::InvalidArgument(format!("step base must lie in (0,1), got {step_base}")));
    }
    let start = Instant::now();
    let mut u = u0.clone();
    let mut records = Vec::new();
    let mut termination = TerminationReason::MaxIterations;

    for n in 1..=stop.max_iterations {
        if let Some(budget) = stop.time_budget {
            if start.elapsed() >= budget {
                termination = TerminationReason::TimeBudget;
                break;
            }
        }
        let subgrad = {
            let gsub = problem.g.subgradient(u.as_slice());
            let gsub = DMatrix::from_column_slice(u.nrows(), u.ncols(), &gsub);
            problem.h.gradient(&u) + gsub
        };
        let dir = -tangent_project(&u, &subgrad);
        let dir_norm = dir.norm();
        let fval = problem.ambient_value(&u);
        if !fval.is_finite() || !dir_norm.is_finite() {
            return Err(Error::NumericalFailure {
                iteration: n,
                what: format!("objective {fval}, direction norm {dir_norm}"),
            });
        }
        let tol_hit = stop.grad_tolerance.is_some_and(|tol| dir_norm <= tol);
        if tol_hit || dir_norm == 0.0 {
            records.push(TraceRecord {
                n,
                mu: 0.0,
                gamma: 0.0,
                grad_norm: dir_norm,
                surrogate_value: fval,
                true_value: fval,
                elapsed_s: start.elapsed().as_secs_f64(),
                bt_count: 0,
            });
            termination =
                if tol_hit { TerminationReason::GradTolerance } else { TerminationReason::ZeroGradient };
            break;
        }
        let gamma = step_base.powi(n as i32);
        u = polar_retract(&u, &(&dir * gamma))?;
        records.push(TraceRecord {
            n,
            mu: 0.0,
            gamma,
            grad_norm: dir_norm,
            surrogate_value: fval,
            true_value: fval,
            elapsed_s: start.elapsed().as_secs_f64(),
            bt_count: 0,
        });
    }

    Ok(SolverTrace { records, termination, final_param: None, final_point: u, iterates: None })
}

/// Riemannian gradient descent on the smoothed objective `h + g^{mu_n}` with
/// the same vanishing index schedule as the chart solver, Armijo
/// backtracking along the retracted curve.
pub fn rsmooth_run(
    problem: &CompositeProblem,
    u0: &DMatrix<f64>,
    schedule: &SmoothingSchedule,
    armijo: &ArmijoConfig,
    stop: &StoppingRule,
) -> Result<SolverTrace> {
    require_identity_map(problem, "the smoothed-gradient baseline")?;
    armijo.validate()?;
    if schedule.eta() + 1e-12 < problem.g.eta() {
        return Err(Error::InvalidArgument(format!(
            "schedule modulus {} is below the penalty's weak-convexity modulus {}",
            schedule.eta(),
            problem.g.eta()
        )));
    }
    let start = Instant::now();
    let mut u = u0.clone();
    let mut records = Vec::new();
    let mut termination = TerminationReason::MaxIterations;
    let mut gamma_initial = armijo.gamma_initial;

    for n in 1..=stop.max_iterations {
        if let Some(budget) = stop.time_budget {
            if start.elapsed() >= budget {
                termination = TerminationReason::TimeBudget;
                break;
            }
        }
        let mu = schedule.mu_at(n);
        let f_sur = problem.ambient_smoothed_value(&u, mu)?;
        let dir = -tangent_project(&u, &problem.ambient_smoothed_grad(&u, mu)?);
        let dir_norm = dir.norm();
        if !f_sur.is_finite() || !dir_norm.is_finite() {
            return Err(Error::NumericalFailure {
                iteration: n,
                what: format!("surrogate value {f_sur}, direction norm {dir_norm}"),
            });
        }
        let fval = problem.ambient_value(&u);
        let tol_hit = stop.grad_tolerance.is_some_and(|tol| dir_norm <= tol);
        if tol_hit || dir_norm == 0.0 {
            records.push(TraceRecord {
                n,
                mu,
                gamma: 0.0,
                grad_norm: dir_norm,
                surrogate_value: f_sur,
                true_value: fval,
                elapsed_s: start.elapsed().as_secs_f64(),
                bt_count: 0,
            });
            termination =
                if tol_hit { TerminationReason::GradTolerance } else { TerminationReason::ZeroGradient };
            break;
        }

        // Armijo along the retracted curve: the directional derivative of the
        // smoothed objective along dir is -||dir||^2.
        let gamma_init = *gamma_initial.get_or_insert_with(|| (1.0 / dir_norm).min(1.0));
        let dir2 = dir_norm * dir_norm;
        let mut gamma = gamma_init;
        let mut accepted = None;
        for k in 1..=armijo.max_trials {
            let trial = polar_retract(&u, &(&dir * gamma))?;
            let ft = problem.ambient_smoothed_value(&trial, mu)?;
            if ft <= f_sur - armijo.c * gamma * dir2 {
                accepted = Some((trial, gamma, k));
                break;
            }
            gamma *= armijo.rho;
        }
        let Some((next, gamma, bt_count)) = accepted else {
            let terms = problem.s_map.codomain_entries(u.nrows(), u.ncols()) + 1;
            if crate::solver::armijo_is_vacuous(armijo.c, gamma_init, dir_norm, f_sur, terms) {
                records.push(TraceRecord {
                    n,
                    mu,
                    gamma: 0.0,
                    grad_norm: dir_norm,
                    surrogate_value: f_sur,
                    true_value: fval,
                    elapsed_s: start.elapsed().as_secs_f64(),
                    bt_count: armijo.max_trials,
                });
                termination = TerminationReason::LineSearchStall;
                break;
            }
            return Err(Error::LineSearchFailure {
                trials: armijo.max_trials,
                f_value: f_sur,
                grad_norm: dir_norm,
                gamma_initial: gamma_init,
            });
        };
        u = next;
        records.push(TraceRecord {
            n,
            mu,
            gamma,
            grad_norm: dir_norm,
            surrogate_value: f_sur,
            true_value: fval,
            elapsed_s: start.elapsed().as_secs_f64(),
            bt_count,
        });
    }

    Ok(SolverTrace { records, termination, final_param: None, final_point: u, iterates: None })
}
