use thiserror::Error;

/// Errors raised by the solver and its oracles.
///
/// Numerical payloads are stored as `f64` regardless of the scalar type used
/// for the computation, so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("λ = {re}{im:+}i lies on a branch cut of ν_{branch}")]
    BranchDomain { branch: usize, re: f64, im: f64 },

    #[error("no exponential decay available at x = 0, t = 0; use the initial datum")]
    NoDecay,

    #[error(
        "quadrature did not converge after {panels} panels \
         (best value {value_re}{value_im:+}i, error estimate {error_estimate:e})"
    )]
    Convergence {
        value_re: f64,
        value_im: f64,
        error_estimate: f64,
        panels: usize,
    },

    #[error("interface system is near singular (condition estimate {condition:e})")]
    NearSingular { condition: f64 },

    #[error("oracle not converged: refinement difference {estimate:e} exceeds {tolerance:e}")]
    OracleUnconverged { estimate: f64, tolerance: f64 },

    #[error("spectral resolution check failed: top-band energy fraction {fraction:e}")]
    Resolution { fraction: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
