//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by the solvers, certificate builders and searches.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix is too ill-conditioned (or singular) for the requested use.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// Operand shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An inner iterative solver did not reach its tolerance.
    #[error("inner solver failed: residual {residual:.3e} after {iterations} iterations")]
    InnerSolver { residual: f64, iterations: usize },

    /// Not enough usable data to form an estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The request targets an analytic branch that is not available.
    #[error("unsupported branch: {0}")]
    UnsupportedBranch(String),

    /// The eigenvalue and minor-sign feasibility routes disagreed, which
    /// signals a numerical breakdown rather than a property of the input.
    #[error(
        "feasibility routes disagree: eigenvalue route says {eigen_feasible}, \
         minor route says {minor_feasible} (lambda_max {lambda_max:.3e})"
    )]
    CheckDisagreement {
        eigen_feasible: bool,
        minor_feasible: bool,
        lambda_max: f64,
    },

    /// A numerical search could not reach a conclusion.
    #[error("search failed: {0}")]
    SearchFailed(String),

    /// A sweep or frontier was asked to run over an empty grid.
    #[error("empty grid: {0}")]
    EmptyGrid(String),

    /// A configuration file could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Shorthand used by validators.
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
