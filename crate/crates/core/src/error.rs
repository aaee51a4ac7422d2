use thiserror::Error;

/// Errors surfaced by the solver and the benchmark layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(
        "point lies in the singular set of the chart: \
         margin {margin:.3e}, |det(I + M_up)| = {det_magnitude:.3e}"
    )]
    SingularPoint { margin: f64, det_magnitude: f64 },

    #[error("chart construction failed: round-trip residual {residual:.3e} exceeds tolerance")]
    ChartConstruction { residual: f64 },

    #[error(
        "line search failed to find an acceptable step after {trials} trials \
         (value {f_value:.6e}, direction norm {grad_norm:.3e}, initial step {gamma_initial:.3e})"
    )]
    LineSearchFailure { trials: u32, f_value: f64, grad_norm: f64, gamma_initial: f64 },

    #[error("non-finite value encountered at iteration {iteration}: {what}")]
    NumericalFailure { iteration: usize, what: String },

    #[error("unsupported problem: {0}")]
    UnsupportedProblem(String),

    #[error("graph construction failed: vertex {vertex} is isolated (degree {degree:.3e})")]
    IsolatedVertex { vertex: usize, degree: f64 },

    #[error("degenerate embedding: row {row} has norm {norm:.3e}, cannot normalize")]
    DegenerateEmbedding { row: usize, norm: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
