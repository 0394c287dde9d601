use thiserror::Error;

/// Certified bracket `[lower, upper]` carried by spectral failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("moment of order {order} diverges for this kernel")]
    InfiniteMoment { order: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("kernel support {support} is finer than the grid spacing {spacing}")]
    UnderResolvedKernel { support: f64, spacing: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator is reducible: the kernel couples no distinct grid points")]
    Reducible,

    #[error("no convergence after {iterations} iterations (last bracket [{:.6e}, {:.6e}])", .bracket.lower, .bracket.upper)]
    NonConvergence { iterations: usize, bracket: Bracket },

    #[error("iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    SolverStalled { iterations: usize, residual: f64 },

    #[error("discretization inconsistency: {0}")]
    DiscretizationInconsistency(String),

    #[error("super-solution construction failed: {0}")]
    SupersolutionConstruction(String),

    #[error("uniqueness violated: iterates from below and above differ by {gap:.3e}")]
    UniquenessViolation { gap: f64 },

    #[error("monotonicity violated: {0}")]
    MonotonicityViolation(String),

    #[error("time step {dt} exceeds the stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("kernel violates the finite (N+1)-moment hypothesis")]
    TailHypothesisViolated,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_param(cond: bool, name: &'static str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason.into(),
        })
    }
}
