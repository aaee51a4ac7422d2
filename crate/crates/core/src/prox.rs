//! Scalar-separable weakly convex penalties and their Moreau envelopes.
//!
//! A penalty g here is `lambda * psi` applied entrywise, where `psi` is either
//! the absolute value or the minimax concave penalty (MCP). Both are
//! Lipschitz with per-entry constant `lambda`; the absolute value is convex
//! (weak-convexity modulus 0) and MCP with width `theta` is
//! `lambda / theta`-weakly convex. For a smoothing index `mu` with
//! `mu * eta < 1` the proximal subproblem is strongly convex, so the prox is
//! single-valued and the envelope is differentiable.

use crate::error::{Error, Result};

/// Entrywise soft threshold: argmin of `t * lambda * |x| + (x - z)^2 / 2`.
pub fn prox_l1(z: &[f64], t: f64, lambda: f64) -> Vec<f64> {
    let thr = t * lambda;
    z.iter()
        .map(|&zi| zi.signum() * (zi.abs() - thr).max(0.0))
        .collect()
}

/// Entrywise prox of `t * lambda * mcp_theta`: argmin of
/// `t * lambda * r_theta(x) + (x - z)^2 / 2` where `r_theta` is the MCP
/// penalty of width `theta`.
///
/// Requires `t * lambda / theta < 1`, otherwise the subproblem loses strong
/// convexity and the minimizer is not unique.
pub fn prox_mcp(z: &[f64], t: f64, lambda: f64, theta: f64) -> Result<Vec<f64>> {
    let thr = t * lambda;
    let shrink = 1.0 - thr / theta;
    if shrink <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "prox of MCP needs t*lambda/theta < 1, got t = {t}, lambda = {lambda}, theta = {theta}"
        )));
    }
    Ok(z.iter()
        .map(|&zi| {
            let a = zi.abs();
            if a <= thr {
                0.0
            } else if a < theta {
                zi.signum() * ((a - thr) / shrink).min(theta)
            } else {
                zi
            }
        })
        .collect())
}

/// Which scalar penalty a [`WeaklyConvexFunction`] wraps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyKind {
    /// `lambda * |x|` entrywise.
    L1,
    /// `lambda * r_theta(x)` entrywise, with
    /// `r_theta(x) = |x| - x^2/(2 theta)` for `|x| <= theta` and `theta / 2`
    /// beyond.
    Mcp { theta: f64 },
}

/// A separable weakly convex penalty `lambda * psi` with known
/// weak-convexity modulus and Lipschitz constant.
#[derive(Debug, Clone)]
pub struct WeaklyConvexFunction {
    kind: PenaltyKind,
    lambda: f64,
    /// Weak-convexity modulus of `lambda * psi`: 0 for L1, `lambda / theta`
    /// for MCP.
    eta: f64,
}

impl WeaklyConvexFunction {
    pub fn l1(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { kind: PenaltyKind::L1, lambda, eta: 0.0 })
    }

    pub fn mcp(lambda: f64, theta: f64) -> Result<Self> {
        if !(lambda > 0.0) || !(theta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda and theta must be positive, got lambda = {lambda}, theta = {theta}"
            )));
        }
        Ok(Self { kind: PenaltyKind::Mcp { theta }, lambda, eta: lambda / theta })
    }

    pub fn kind(&self) -> PenaltyKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Weak-convexity modulus of the penalty.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Per-entry Lipschitz constant (both penalties: `lambda`).
    pub fn lipschitz_per_entry(&self) -> f64 {
        self.lambda
    }

    /// Lipschitz constant with respect to the Frobenius norm on arrays of
    /// `entries` entries: `lambda * sqrt(entries)`.
    pub fn lipschitz_frob(&self, entries: usize) -> f64 {
        self.lambda * (entries as f64).sqrt()
    }

    /// Checks that `mu` is a valid smoothing index: positive, and below
    /// `1 / eta` when the penalty is nonconvex.
    pub fn check_index(&self, mu: f64) -> Result<()> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidArgument(format!("smoothing index must be positive, got {mu}")));
        }
        if self.eta > 0.0 && mu * self.eta >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "smoothing index {mu} is not below 1/eta = {}",
                1.0 / self.eta
            )));
        }
        Ok(())
    }

    /// Penalty value summed over entries.
    pub fn value(&self, z: &[f64]) -> f64 {
        match self.kind {
            PenaltyKind::L1 => self.lambda * z.iter().map(|x| x.abs()).sum::<f64>(),
            PenaltyKind::Mcp { theta } => {
                self.lambda
                    * z.iter()
                        .map(|&x| {
                            let a = x.abs();
                            if a <= theta { a - x * x / (2.0 * theta) } else { theta / 2.0 }
                        })
                        .sum::<f64>()
            }
        }
    }

    /// Entrywise proximal point with index `mu`.
    pub fn prox(&self, z: &[f64], mu: f64) -> Result<Vec<f64>> {
        self.check_index(mu)?;
        match self.kind {
            PenaltyKind::L1 => Ok(prox_l1(z, mu, self.lambda)),
            PenaltyKind::Mcp { theta } => prox_mcp(z, mu, self.lambda, theta),
        }
    }

    /// Moreau envelope value at `z` with index `mu`:
    /// `g(prox) + ||prox - z||^2 / (2 mu)`.
    pub fn moreau_value(&self, z: &[f64], mu: f64) -> Result<f64> {
        let p = self.prox(z, mu)?;
        let dist2: f64 = p.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok(self.value(&p) + dist2 / (2.0 * mu))
    }

    /// Gradient of the Moreau envelope at `z`: `(z - prox(z)) / mu`.
    pub fn moreau_grad(&self, z: &[f64], mu: f64) -> Result<Vec<f64>> {
        let p = self.prox(z, mu)?;
        Ok(z.iter().zip(&p).map(|(zi, pi)| (zi - pi) / mu).collect())
    }

    /// An entrywise subgradient selection (used by the subgradient baseline):
    /// `lambda * sign(x)` for L1 (0 at 0), `lambda * sign(x) (1 - |x|/theta)`
    /// inside the MCP well and 0 beyond.
    pub fn subgradient(&self, z: &[f64]) -> Vec<f64> {
        match self.kind {
            PenaltyKind::L1 => z.iter().map(|&x| self.lambda * sign0(x)).collect(),
            PenaltyKind::Mcp { theta } => z
                .iter()
                .map(|&x| {
                    let a = x.abs();
                    if a <= theta { self.lambda * sign0(x) * (1.0 - a / theta) } else { 0.0 }
                })
                .collect(),
        }
    }
}

fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}
