//! Crate-wide error type.

/// Errors produced by grid construction, solvers and diagnostics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid parameters (non-divisible spacing, bad dimension, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An iterative solve stopped before reaching its residual target.
    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    /// Constraints that no field can satisfy.
    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    /// A requested radius or scale is too small for the grid spacing.
    #[error("under-resolved: {0}")]
    UnderResolved(String),

    /// A set-valued input or derived set was empty where a nonempty one is required.
    #[error("empty set: {0}")]
    EmptySet(String),

    /// Free-boundary descent saw the total energy increase; carries the energy trace.
    #[error("energy not monotone along descent: {0:?}")]
    Oscillation(Vec<f64>),

    /// Foot-point projection onto a comparison surface failed to converge.
    #[error("foot-point projection did not converge near {0:?}: non-unique projection")]
    FootPoint([f64; 3]),

    /// A rescaling or translation leaves the source grid.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A solver produced a result that contradicts what it certifies.
    #[error("solver failure: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
