//! Chart of the Stiefel manifold St(p, N) through the inverse Cayley
//! transform.
//!
//! A chart is an orthogonal `S`; the parameter domain is the linear space
//! `Q = { [[A, -B^T], [B, 0]] : A skew p x p, B (N-p) x p }` and the map is
//! `V  |->  S (I - V)(I + V)^{-1} I_{N x p}`, whose image is the Stiefel
//! manifold minus the chart's singular set `det(I_p + I^T S^T U) = 0`. Its
//! differential has operator norm at most 2 and is 4-Lipschitz in V, which is
//! what makes the smoothed objectives pulled back through it have computable
//! gradient Lipschitz constants.
//!
//! `V` is stored as the block pair `(A, B)`; `I + V` never exists as an
//! N x N matrix. Solves against `I +- V` reduce, by eliminating the trailing
//! identity block, to p x p systems with matrix `I +- A + B^T B`, so chart
//! evaluations cost O(N p^2 + p^3) plus one multiply by `S`.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;

/// Tolerance below which a chart point is treated as singular.
pub const SINGULARITY_TOL: f64 = 1e-8;

/// Round-trip residual allowed when anchoring a chart at a point.
pub const ANCHOR_RESIDUAL_TOL: f64 = 1e-10;

/// Element of the parameter space `Q`: the full matrix is
/// `[[A, -B^T], [B, 0]]` with `A` skew.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewParam {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl SkewParam {
    /// Builds a parameter from its blocks; `a` is skew-symmetrized, so only
    /// its skew part survives.
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!("A block must be square, got {}x{}", a.nrows(), a.ncols())));
        }
        if b.ncols() != a.ncols() {
            return Err(Error::Dimension(format!(
                "B block must have {} columns, got {}",
                a.ncols(),
                b.ncols()
            )));
        }
        let a = (&a - a.transpose()) * 0.5;
        Ok(Self { a, b })
    }

    pub fn zeros(n: usize, p: usize) -> Result<Self> {
        if p == 0 || n < p {
            return Err(Error::Dimension(format!("need 1 <= p <= n, got n = {n}, p = {p}")));
        }
        Ok(Self { a: DMatrix::zeros(p, p), b: DMatrix::zeros(n - p, p) })
    }

    /// Random element with entries uniform in `[-scale, scale]` (tests and
    /// self-checks).
    pub fn random(n: usize, p: usize, scale: f64, rng: &mut impl Rng) -> Result<Self> {
        let a = DMatrix::from_fn(p, p, |_, _| rng.gen_range(-scale..=scale));
        let b = DMatrix::from_fn(n - p, p, |_, _| rng.gen_range(-scale..=scale));
        Self::new(a, b)
    }

    pub fn n(&self) -> usize {
        self.a.nrows() + self.b.nrows()
    }

    pub fn p(&self) -> usize {
        self.a.ncols()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// Embeds into the full N x N skew matrix (reference implementation and
    /// diagnostics; the solvers never call this).
    pub fn to_full(&self) -> DMatrix<f64> {
        let (n, p) = (self.n(), self.p());
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (p, p)).copy_from(&self.a);
        m.view_mut((p, 0), (n - p, p)).copy_from(&self.b);
        m.view_mut((0, p), (p, n - p)).copy_from(&(-self.b.transpose()));
        m
    }

    /// Inner product of `Q` as a subspace of N x N matrices with the
    /// Frobenius inner product: the `B` block counts twice.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!((self.n(), self.p()), (other.n(), other.p()));
        self.a.dot(&other.a) + 2.0 * self.b.dot(&other.b)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        self.a.zip_apply(&other.a, |d, s| *d += alpha * s);
        self.b.zip_apply(&other.b, |d, s| *d += alpha * s);
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self { a: &self.a * alpha, b: &self.b * alpha }
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|x| x.is_finite()) && self.b.iter().all(|x| x.is_finite())
    }

    /// `[A X_up - B^T X_lo; B X_up]`, the action of the full matrix on an
    /// N x p block vector.
    fn mul_tall(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let p = self.p();
        let x_up = x.rows(0, p);
        let x_lo = x.rows(p, self.n() - p);
        let up = &self.a * x_up - self.b.transpose() * x_lo;
        let lo = &self.b * x_up;
        stack_tall(&up, &lo)
    }

    /// Solves `(I + V) X = rhs` (`sign = +1`) or `(I - V) X = rhs`
    /// (`sign = -1`) for a tall rhs, via the p x p reduced system
    /// `(I +- A + B^T B) X_up = rhs_up +- B^T rhs_lo`.
    fn solve_shifted(&self, sign: f64, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let p = self.p();
        let rhs_up = rhs.rows(0, p);
        let rhs_lo = rhs.rows(p, self.n() - p);
        let mut reduced = &self.a * sign + self.b.transpose() * &self.b;
        for i in 0..p {
            reduced[(i, i)] += 1.0;
        }
        let rhs_red = rhs_up + self.b.transpose() * rhs_lo * sign;
        let x_up = reduced
            .lu()
            .solve(&rhs_red)
            .ok_or_else(|| Error::LinearSolve("reduced chart system is singular".into()))?;
        let x_lo = rhs_lo - &self.b * &x_up * sign;
        Ok(stack_tall(&x_up, &x_lo))
    }
}

fn stack_tall(up: &DMatrix<f64>, lo: &DMatrix<f64>) -> DMatrix<f64> {
    let p = up.ncols();
    let n = up.nrows() + lo.nrows();
    let mut out = DMatrix::zeros(n, p);
    out.view_mut((0, 0), (up.nrows(), p)).copy_from(up);
    out.view_mut((up.nrows(), 0), (lo.nrows(), p)).copy_from(lo);
    out
}

/// The tall slice `[I_p; 0]` of the identity.
fn eye_tall(n: usize, p: usize) -> DMatrix<f64> {
    DMatrix::identity(n, p)
}

/// A chart of St(p, N): the orthogonal matrix `S` plus dimensions.
#[derive(Debug, Clone)]
pub struct CayleyChart {
    s: DMatrix<f64>,
    p: usize,
}

impl CayleyChart {
    pub fn new(s: DMatrix<f64>, p: usize) -> Result<Self> {
        let n = s.nrows();
        if !s.is_square() {
            return Err(Error::Dimension(format!("S must be square, got {}x{}", n, s.ncols())));
        }
        if p == 0 || p > n {
            return Err(Error::Dimension(format!("need 1 <= p <= n = {n}, got p = {p}")));
        }
        let mut gram = s.transpose() * &s;
        for i in 0..n {
            gram[(i, i)] -= 1.0;
        }
        if gram.norm() > 1e-10 * (n as f64) {
            return Err(Error::InvalidArgument(format!(
                "S is not orthogonal: ||S^T S - I|| = {:.3e}",
                gram.norm()
            )));
        }
        Ok(Self { s, p })
    }

    /// Chart with `S = I`.
    pub fn identity(n: usize, p: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n), p)
    }

    /// Chart anchored at `u0`: `S = diag(Q1 Q2^T, I)` where the top p x p
    /// block of `u0` has SVD `Q1 Sigma Q2^T`. With this choice
    /// `I + (S^T u0)_up = I + Q2 Sigma Q2^T` is positive definite, so the
    /// anchor sits well inside the chart (margin at least 1). Returns the
    /// chart together with the parameter mapping to `u0`.
    pub fn from_anchor(u0: &DMatrix<f64>) -> Result<(Self, SkewParam)> {
        let n = u0.nrows();
        let p = u0.ncols();
        if p == 0 || p > n {
            return Err(Error::Dimension(format!("anchor must be a tall matrix, got {n}x{p}")));
        }
        let top = u0.rows(0, p).clone_owned();
        let svd = top.svd(true, true);
        let q1 = svd.u.as_ref().expect("svd with vectors");
        let q2t = svd.v_t.as_ref().expect("svd with vectors");
        let rot = q1 * q2t;
        let mut s = DMatrix::identity(n, n);
        s.view_mut((0, 0), (p, p)).copy_from(&rot);
        let chart = Self::new(s, p)?;
        let v0 = chart.forward(u0)?;
        let back = chart.inverse(&v0);
        let residual = (&back - u0).norm();
        if residual > ANCHOR_RESIDUAL_TOL {
            return Err(Error::ChartConstruction { residual });
        }
        Ok((chart, v0))
    }

    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// The image of `V = 0`, i.e. the first p columns of `S`.
    pub fn base_point(&self) -> DMatrix<f64> {
        self.s.columns(0, self.p).clone_owned()
    }

    /// Chart map `V |-> S (I - V)(I + V)^{-1} I_{N x p}`. Always defined;
    /// lands on the Stiefel manifold up to rounding.
    pub fn inverse(&self, v: &SkewParam) -> DMatrix<f64> {
        let w = v
            .solve_shifted(1.0, &eye_tall(v.n(), v.p()))
            .expect("I + V is invertible for skew V");
        let inner = &w - v.mul_tall(&w);
        &self.s * inner
    }

    /// Differential of the chart map at `v` along `d`:
    /// `-2 S (I + V)^{-1} D (I + V)^{-1} I_{N x p}`.
    pub fn differential(&self, v: &SkewParam, d: &SkewParam) -> DMatrix<f64> {
        let x = v
            .solve_shifted(1.0, &eye_tall(v.n(), v.p()))
            .expect("I + V is invertible for skew V");
        let y = d.mul_tall(&x);
        let z = v.solve_shifted(1.0, &y).expect("I + V is invertible for skew V");
        &self.s * z * -2.0
    }

    /// Adjoint of the differential: for an ambient cotangent `m` (N x p),
    /// returns the element of `Q` representing `D |-> <differential(v, D), m>`
    /// under the `Q` inner product. Formula: project
    /// `-2 (I - V)^{-1} S^T m I^T (I - V)^{-1}` onto `Q`.
    pub fn adjoint_differential(&self, v: &SkewParam, m: &DMatrix<f64>) -> SkewParam {
        let p = v.p();
        let n = v.n();
        let t = v
            .solve_shifted(-1.0, &(self.s.transpose() * m))
            .expect("I - V is invertible for skew V");
        // (I - V)^{-T} I_{N x p} = (I + V)^{-1} I_{N x p}
        let y = v
            .solve_shifted(1.0, &eye_tall(n, p))
            .expect("I + V is invertible for skew V");
        // G = -2 T Y^T, needed only through its projection onto Q:
        // A = skew(G_ul), B = (G_ll - G_ur^T)/2.
        let t_up = t.rows(0, p);
        let t_lo = t.rows(p, n - p);
        let y_up = y.rows(0, p);
        let y_lo = y.rows(p, n - p);
        let a = y_up * t_up.transpose() - t_up * y_up.transpose();
        let b = y_lo * t_up.transpose() - t_lo * y_up.transpose();
        SkewParam { a, b }
    }

    /// Distance of `u` from the chart's singular set, measured as the
    /// smallest singular value of `I_p + (S^T u)_up`. Ranges over (0, 2] on
    /// the chart's domain, 0 exactly on the singular set.
    pub fn singularity_margin(&self, u: &DMatrix<f64>) -> f64 {
        let m_up = (self.s.transpose() * u).rows(0, self.p).clone_owned();
        let shifted = &m_up + DMatrix::identity(self.p, self.p);
        shifted.svd(false, false).singular_values.min()
    }

    /// Forward chart map `Phi_S`: finds the `V` in `Q` with
    /// `inverse(V) = u`. Requires `u` orthonormal and away from the chart's
    /// singular set.
    ///
    /// Derivation: with `M = S^T u`, the defining equation pins
    /// `(I + V)^{-1} I = (M + I)/2`, hence `V (M + I) = I - M`, which solves
    /// blockwise to `B = -M_lo (M_up + I)^{-1}` and
    /// `A = (I - M_up + B^T M_lo)(M_up + I)^{-1}`; `A` is skew whenever
    /// `u^T u = I` and is re-skewed to absorb rounding.
    pub fn forward(&self, u: &DMatrix<f64>) -> Result<SkewParam> {
        let p = self.p;
        let n = self.n();
        if u.nrows() != n || u.ncols() != p {
            return Err(Error::Dimension(format!(
                "expected a {n}x{p} point, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        let m = self.s.transpose() * u;
        let m_up = m.rows(0, p).clone_owned();
        let m_lo = m.rows(p, n - p).clone_owned();
        let shifted = &m_up + DMatrix::identity(p, p);
        let margin = shifted.clone().svd(false, false).singular_values.min();
        if margin <= SINGULARITY_TOL {
            let det_magnitude = shifted.determinant().abs();
            return Err(Error::SingularPoint { margin, det_magnitude });
        }
        // right division X C^{-1} via C^T X^T = (numerator)^T
        let lu = shifted.transpose().lu();
        let b = lu
            .solve(&(-m_lo.transpose()))
            .ok_or_else(|| Error::LinearSolve("chart forward system is singular".into()))?
            .transpose();
        let a_num = DMatrix::identity(p, p) - &m_up + b.transpose() * &m_lo;
        let a = lu
            .solve(&a_num.transpose())
            .ok_or_else(|| Error::LinearSolve("chart forward system is singular".into()))?
            .transpose();
        SkewParam::new(a, b)
    }
}
