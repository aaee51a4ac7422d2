//! Per-iteration solver traces and their CSV form.

use crate::cayley::SkewParam;
use crate::error::Result;
use nalgebra::DMatrix;
use std::io::Write;

/// One solver iteration. `surrogate_value` and `true_value` are measured at
/// the iterate the step departed from; `bt_count` is the number of objective
/// evaluations the line search spent (0 when no line search ran).
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub n: usize,
    pub mu: f64,
    pub gamma: f64,
    pub grad_norm: f64,
    pub surrogate_value: f64,
    pub true_value: f64,
    pub elapsed_s: f64,
    pub bt_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    MaxIterations,
    GradTolerance,
    TimeBudget,
    /// The surrogate gradient vanished exactly; no descent direction exists.
    ZeroGradient,
    /// The line search ran out of trials while the decrease it demands sits
    /// below the objective's floating-point resolution: the iterate is
    /// stationary to machine precision.
    LineSearchStall,
}

impl std::fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::MaxIterations => "max_iterations",
            Self::GradTolerance => "grad_tolerance",
            Self::TimeBudget => "time_budget",
            Self::ZeroGradient => "zero_gradient",
            Self::LineSearchStall => "line_search_stall",
        };
        f.write_str(s)
    }
}

/// Trace of one solver run.
#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub records: Vec<TraceRecord>,
    pub termination: TerminationReason,
    /// Final chart parameter (absent for solvers that do not run in a chart).
    pub final_param: Option<SkewParam>,
    /// Final point on the manifold.
    pub final_point: DMatrix<f64>,
    /// Iterate snapshots when requested: `iterates[j]` is the parameter the
    /// j-th record was evaluated at, followed by one final entry.
    pub iterates: Option<Vec<SkewParam>>,
}

impl SolverTrace {
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.n)
    }

    pub fn final_record(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Smallest gradient norm seen along the run.
    pub fn min_grad_norm(&self) -> f64 {
        self.records.iter().map(|r| r.grad_norm).fold(f64::INFINITY, f64::min)
    }

    /// Writes the trace as a CSV file at `path`.
    pub fn write_csv_file(&self, path: &std::path::Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut file)
    }

    /// Writes the trace as CSV with the fixed column set.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "n,mu,gamma,grad_norm,surrogate_value,true_value,elapsed_s,bt_count")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.n, r.mu, r.gamma, r.grad_norm, r.surrogate_value, r.true_value, r.elapsed_s, r.bt_count
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_rows() {
        let trace = SolverTrace {
            records: vec![TraceRecord {
                n: 1,
                mu: 0.5,
                gamma: 0.25,
                grad_norm: 1.0,
                surrogate_value: 2.0,
                true_value: 2.5,
                elapsed_s: 0.001,
                bt_count: 3,
            }],
            termination: TerminationReason::MaxIterations,
            final_param: None,
            final_point: DMatrix::identity(2, 1),
            iterates: None,
        };
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,mu,gamma,grad_norm,surrogate_value,true_value,elapsed_s,bt_count"
        );
        assert_eq!(lines.next().unwrap(), "1,0.5,0.25,1,2,2.5,0.001,3");
    }
}
