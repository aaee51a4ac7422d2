//! Brute-force reference implementations used by the self-test suites.
//!
//! Everything here is deliberately independent of the closed-form code paths
//! it checks: proximal points are found by scanning a 1-D grid, derivatives by
//! central differences. Slow and dumb on purpose; the unit and acceptance
//! tests freeze their outputs as ground truth.

use nalgebra::DMatrix;

/// Minimizes a scalar function by a coarse scan over `[lo, hi]` followed by a
/// fine scan around the coarse argmin. Returns `(argmin, min)`.
///
/// Resolution of the result is `fine_step`; the function must not have
/// structure narrower than `coarse_step` anywhere except near its minimum.
pub fn grid_min_1d(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    coarse_step: f64,
    fine_step: f64,
) -> (f64, f64) {
    let (mut best_x, mut best_f) = scan(&f, lo, hi, coarse_step);
    let (x, fx) = scan(
        &f,
        (best_x - 2.0 * coarse_step).max(lo),
        (best_x + 2.0 * coarse_step).min(hi),
        fine_step,
    );
    if fx < best_f {
        best_x = x;
        best_f = fx;
    }
    (best_x, best_f)
}

fn scan(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let count = ((hi - lo) / step).ceil() as usize;
    let mut best_x = lo;
    let mut best_f = f(lo);
    for i in 1..=count {
        let x = (lo + i as f64 * step).min(hi);
        let fx = f(x);
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
    }
    (best_x, best_f)
}

/// Proximal point of `t * pen` at `z`, found on a grid. `pen` is the scalar
/// penalty; the objective scanned is `t * pen(x) + (x - z)^2 / 2`.
///
/// The scan covers `[-(|z| + 2), |z| + 2]`, which always brackets the
/// minimizer: the objective at x = 0 is `t*pen(0) + z^2/2` while any
/// |x| > |z| + margin costs more in the quadratic alone than that whenever
/// pen >= 0 and pen(0) = 0.
pub fn prox_oracle(pen: impl Fn(f64) -> f64, t: f64, z: f64) -> f64 {
    let r = z.abs() + 2.0;
    let obj = |x: f64| t * pen(x) + 0.5 * (x - z) * (x - z);
    grid_min_1d(obj, -r, r, 1e-3, 1e-6).0
}

/// Moreau envelope value of `t * pen` at `z`, by the same grid scan.
pub fn moreau_oracle(pen: impl Fn(f64) -> f64, t: f64, z: f64) -> f64 {
    let r = z.abs() + 2.0;
    let obj = |x: f64| pen(x) + 0.5 * (x - z) * (x - z) / t;
    grid_min_1d(obj, -r, r, 1e-3, 1e-6).1
}

/// Central difference of a scalar function.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Directional derivative of a matrix functional along `dir`, by central
/// differences: `(f(x + h dir) - f(x - h dir)) / 2h`.
pub fn directional_diff(
    f: impl Fn(&DMatrix<f64>) -> f64,
    x: &DMatrix<f64>,
    dir: &DMatrix<f64>,
    h: f64,
) -> f64 {
    let plus = f(&(x + dir * h));
    let minus = f(&(x - dir * h));
    (plus - minus) / (2.0 * h)
}
