//! Smoothing-index schedule `mu_n = scale * n^(-1/alpha)`.
//!
//! The convergence argument needs four things of the sequence: it vanishes,
//! it is not summable, it is nonincreasing, and consecutive terms have a
//! bounded ratio. The power law with `alpha >= 1` delivers all four with
//! ratio bound `2^(1/alpha)`, and staying at or below `1/(2 eta)` keeps every
//! index in the range where the envelope gradient is `1/mu`-Lipschitz.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SmoothingSchedule {
    eta: f64,
    alpha: f64,
    scale: f64,
}

impl SmoothingSchedule {
    /// Schedule `mu_n = n^(-1/alpha) / (2 eta)` for an `eta`-weakly convex
    /// penalty. `eta` must be positive (a convex penalty is handled by
    /// running the schedule with any positive surrogate modulus).
    pub fn new(eta: f64, alpha: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::InvalidArgument(format!("eta must be positive, got {eta}")));
        }
        Self::with_scale(eta, alpha, 1.0 / (2.0 * eta))
    }

    /// Same power law with an explicit leading coefficient,
    /// `0 < scale <= 1/(2 eta)`.
    pub fn with_scale(eta: f64, alpha: f64, scale: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::InvalidArgument(format!("eta must be positive, got {eta}")));
        }
        if !(alpha >= 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must be at least 1, got {alpha}")));
        }
        if !(scale > 0.0) || scale > 1.0 / (2.0 * eta) + 1e-15 {
            return Err(Error::InvalidArgument(format!(
                "scale must lie in (0, 1/(2 eta)] = (0, {}], got {scale}",
                1.0 / (2.0 * eta)
            )));
        }
        Ok(Self { eta, alpha, scale })
    }

    /// `mu_n`, for `n >= 1`.
    pub fn mu_at(&self, n: usize) -> f64 {
        assert!(n >= 1, "schedule is indexed from 1");
        self.scale * (n as f64).powf(-1.0 / self.alpha)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Bound `M` on the ratio `mu_n / mu_(n+1)`; for the power law this is
    /// `2^(1/alpha)` (attained at n = 1).
    pub fn ratio_bound(&self) -> f64 {
        2f64.powf(1.0 / self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_values() {
        let s = SmoothingSchedule::new(0.5, 3.0).unwrap();
        assert!((s.mu_at(1) - 1.0).abs() < 1e-15);
        assert!((s.mu_at(8) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validity_over_long_horizon() {
        let s = SmoothingSchedule::new(1.0, 3.0).unwrap();
        let m = s.ratio_bound();
        let mut prev = s.mu_at(1);
        assert!(prev <= 1.0 / (2.0 * s.eta()) + 1e-15);
        // check monotonicity and the ratio bound on a log-spaced sample up to 1e6
        let mut n = 1usize;
        while n < 1_000_000 {
            let next = s.mu_at(n + 1);
            assert!(next <= prev);
            assert!(prev / next <= m + 1e-12, "ratio violated at n = {n}");
            prev = next;
            n = n * 13 / 8 + 1;
        }
        // ratio bound is attained at n = 1
        assert!((s.mu_at(1) / s.mu_at(2) - m).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SmoothingSchedule::new(0.0, 3.0).is_err());
        assert!(SmoothingSchedule::new(1.0, 0.5).is_err());
        assert!(SmoothingSchedule::with_scale(1.0, 3.0, 0.6).is_err());
        assert!(SmoothingSchedule::with_scale(1.0, 3.0, 0.5).is_ok());
    }
}
