//! Variable-smoothing optimization of weakly convex composite objectives
//! over the Stiefel manifold.
//!
//! The problem class is `minimize h(U) + g(S(U))` over orthonormal N x p
//! matrices, with `h` smooth, `S` a smooth matrix map, and `g` a separable
//! weakly convex penalty (L1 or MCP). The manifold constraint is absorbed by
//! a chart built on the inverse Cayley transform ([`cayley`]), the penalty is
//! smoothed by its Moreau envelope with a vanishing index sequence
//! ([`prox`], [`schedule`]), and plain gradient descent with Armijo
//! backtracking runs in the flat chart domain ([`solver`]). Every iterate
//! maps to an exactly orthonormal matrix, and the surrogate gradients vanish
//! at a `1/sqrt(sum of indices)` rate.
//!
//! Two retraction-based baselines ([`baselines`]) and two benchmark
//! applications, sparse PCA ([`spca`]) and sparse spectral clustering
//! ([`ssc`]), exercise the solver end to end.

pub mod baselines;
pub mod cayley;
pub mod cluster;
pub mod composite;
pub mod error;
pub mod oracle;
pub mod prox;
pub mod schedule;
pub mod selftest;
pub mod solver;
pub mod spca;
pub mod ssc;
pub mod stiefel;
pub mod trace;

pub use cayley::{CayleyChart, SkewParam};
pub use composite::{CompositeProblem, IdentityMap, LipschitzModel, OuterProductMap, SmoothMap, SmoothObjective};
pub use error::{Error, Result};
pub use prox::{PenaltyKind, WeaklyConvexFunction};
pub use schedule::SmoothingSchedule;
pub use solver::{backtrack, lipschitz_step, vsmooth_run, ArmijoConfig, SolverOptions, StepMode, StoppingRule};
pub use trace::{SolverTrace, TerminationReason, TraceRecord};
