//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the cavity engine.
#[derive(Debug, Error)]
pub enum CavityError {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A trajectory constructor rejected its parameters or data.
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    /// A root bracket could not be established (e.g. the trajectory is
    /// undefined over the range a retardation solve needs).
    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    /// An iterative root solve hit its iteration cap before reaching the
    /// requested residual.
    #[error("root solve did not converge: {0}")]
    RootNoConverge(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: requested {requested:.3e}, achieved error estimate {achieved:.3e}")]
    QuadratureNoConverge { requested: f64, achieved: f64 },

    /// A documented precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A fit or tail-limit estimate failed to converge.
    #[error("fit did not converge: {0}")]
    FitNoConverge(String),

    /// Two evaluation routes that must agree (a built-in diagnostic)
    /// disagreed beyond tolerance.
    #[error("internal cross-check failed: {what}: {lhs:.6e} vs {rhs:.6e}")]
    DiagnosticMismatch { what: String, lhs: f64, rhs: f64 },

    /// File input could not be read or parsed.
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, CavityError>;
