//! The composite objective `h + g o S` on the Stiefel manifold and its
//! smoothed surrogates pulled back through a chart.
//!
//! `h` is smooth, `S` is a smooth map into the space where the separable
//! weakly convex penalty `g` lives, and the chart turns the constrained
//! problem into unconstrained minimization over the linear parameter space.
//! The surrogate with index `mu` replaces `g` by its Moreau envelope; its
//! gradient at `V` is the chart adjoint applied to
//! `grad h(U) + (DS(U))^* [grad g^mu(S(U))]` with `U` the chart image of `V`.

use crate::cayley::{CayleyChart, SkewParam};
use crate::error::Result;
use crate::prox::WeaklyConvexFunction;
use nalgebra::DMatrix;

/// Smooth part `h` of the objective.
pub trait SmoothObjective: Send + Sync {
    fn value(&self, u: &DMatrix<f64>) -> f64;
    fn gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64>;
    /// Lipschitz constant of the gradient, when known.
    fn grad_lipschitz(&self) -> Option<f64> {
        None
    }
}

/// Smooth inner map `S` from Stiefel points into the penalty's space.
pub trait SmoothMap: Send + Sync {
    fn apply(&self, u: &DMatrix<f64>) -> DMatrix<f64>;
    /// Adjoint of the differential at `u`, applied to a cotangent of the
    /// codomain; returns an N x p matrix.
    fn adjoint_differential(&self, u: &DMatrix<f64>, cotangent: &DMatrix<f64>) -> DMatrix<f64>;
    /// Number of entries of the codomain for an N x p input (the dimension
    /// over which the separable penalty sums).
    fn codomain_entries(&self, n: usize, p: usize) -> usize;
    fn is_identity(&self) -> bool {
        false
    }
}

/// `S = Id`.
pub struct IdentityMap;

impl SmoothMap for IdentityMap {
    fn apply(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        u.clone()
    }

    fn adjoint_differential(&self, _u: &DMatrix<f64>, cotangent: &DMatrix<f64>) -> DMatrix<f64> {
        cotangent.clone()
    }

    fn codomain_entries(&self, n: usize, p: usize) -> usize {
        n * p
    }

    fn is_identity(&self) -> bool {
        true
    }
}

/// `S(U) = U U^T`; the adjoint of its differential is `M |-> (M + M^T) U`.
pub struct OuterProductMap;

impl SmoothMap for OuterProductMap {
    fn apply(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        u * u.transpose()
    }

    fn adjoint_differential(&self, u: &DMatrix<f64>, cotangent: &DMatrix<f64>) -> DMatrix<f64> {
        (cotangent + cotangent.transpose()) * u
    }

    fn codomain_entries(&self, n: usize, _p: usize) -> usize {
        n * n
    }
}

/// Smooth objective defined by closures (tests and small experiments).
pub struct FnObjective<V, G>
where
    V: Fn(&DMatrix<f64>) -> f64 + Send + Sync,
    G: Fn(&DMatrix<f64>) -> DMatrix<f64> + Send + Sync,
{
    pub value_fn: V,
    pub grad_fn: G,
}

impl<V, G> SmoothObjective for FnObjective<V, G>
where
    V: Fn(&DMatrix<f64>) -> f64 + Send + Sync,
    G: Fn(&DMatrix<f64>) -> DMatrix<f64> + Send + Sync,
{
    fn value(&self, u: &DMatrix<f64>) -> f64 {
        (self.value_fn)(u)
    }

    fn gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        (self.grad_fn)(u)
    }
}

/// Constants of the model `L(mu) = varpi1 + varpi2 / mu` bounding the
/// gradient Lipschitz constant of the smoothed pullback.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzModel {
    pub varpi1: f64,
    pub varpi2: f64,
}

impl LipschitzModel {
    pub fn lipschitz(&self, mu: f64) -> f64 {
        self.varpi1 + self.varpi2 / mu
    }
}

/// The full problem: minimize `h(U) + g(S(U))` over the Stiefel manifold,
/// expressed in a fixed chart.
pub struct CompositeProblem {
    pub h: Box<dyn SmoothObjective>,
    pub s_map: Box<dyn SmoothMap>,
    pub g: WeaklyConvexFunction,
    pub chart: CayleyChart,
}

impl CompositeProblem {
    /// Chart image of a parameter (an orthonormal N x p matrix).
    pub fn to_stiefel(&self, v: &SkewParam) -> DMatrix<f64> {
        self.chart.inverse(v)
    }

    /// Entry count of the space the penalty lives in.
    pub fn penalty_entries(&self) -> usize {
        self.s_map.codomain_entries(self.chart.n(), self.chart.p())
    }

    /// Frobenius-level Lipschitz constant of `g` on the penalty space.
    pub fn g_lipschitz_frob(&self) -> f64 {
        self.g.lipschitz_frob(self.penalty_entries())
    }

    /// `h(U) + g(S(U))` at a Stiefel point.
    pub fn ambient_value(&self, u: &DMatrix<f64>) -> f64 {
        let z = self.s_map.apply(u);
        self.h.value(u) + self.g.value(z.as_slice())
    }

    /// `h(U) + g^mu(S(U))` at a Stiefel point.
    pub fn ambient_smoothed_value(&self, u: &DMatrix<f64>, mu: f64) -> Result<f64> {
        let z = self.s_map.apply(u);
        Ok(self.h.value(u) + self.g.moreau_value(z.as_slice(), mu)?)
    }

    /// Euclidean gradient of `h + g^mu o S` at a Stiefel point (an ambient
    /// N x p matrix, not yet pulled back).
    pub fn ambient_smoothed_grad(&self, u: &DMatrix<f64>, mu: f64) -> Result<DMatrix<f64>> {
        let z = self.s_map.apply(u);
        let env_grad = self.g.moreau_grad(z.as_slice(), mu)?;
        let cotangent = DMatrix::from_column_slice(z.nrows(), z.ncols(), &env_grad);
        Ok(self.h.gradient(u) + self.s_map.adjoint_differential(u, &cotangent))
    }

    /// Surrogate `(h + g^mu o S) o F` at a chart parameter.
    pub fn surrogate_value(&self, v: &SkewParam, mu: f64) -> Result<f64> {
        self.ambient_smoothed_value(&self.to_stiefel(v), mu)
    }

    /// Gradient of the surrogate at a chart parameter, as an element of the
    /// parameter space.
    pub fn surrogate_grad(&self, v: &SkewParam, mu: f64) -> Result<SkewParam> {
        let u = self.to_stiefel(v);
        let ambient = self.ambient_smoothed_grad(&u, mu)?;
        Ok(self.chart.adjoint_differential(v, &ambient))
    }

    /// True objective `(h + g o S) o F` at a chart parameter.
    pub fn true_value(&self, v: &SkewParam) -> f64 {
        self.ambient_value(&self.to_stiefel(v))
    }
}
