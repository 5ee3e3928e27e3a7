//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A Cholesky pivot was non-positive; the matrix has no SPD factorization.
    #[error("matrix is not positive definite: pivot {pivot:.6e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    /// Power iteration exhausted its iteration budget. The last Rayleigh
    /// quotient is carried along so callers that only need a monitored value
    /// can still use it (flagged, not silently).
    #[error("eigenvalue iteration did not converge in {max_iter} iterations (last estimate {last_estimate:.12e})")]
    NoConvergence { max_iter: usize, last_estimate: f64 },

    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("column {column} has only {observed} observed values; at least 2 are required")]
    TooFewObserved { column: String, observed: usize },

    /// The ridge-stabilized normal equations were still not positive definite.
    #[error("singular system while imputing column {column}: {detail}")]
    SingularSystem { column: String, detail: String },

    /// Too few observed rows to leave positive residual degrees of freedom.
    #[error("column {column} has {n_obs} observed rows for {n_params} parameters; no residual degrees of freedom")]
    DegenerateResidual {
        column: String,
        n_obs: usize,
        n_params: usize,
    },

    #[error("insufficient draws: need at least {needed} iterations, got {got}")]
    InsufficientDraws { needed: usize, got: usize },

    #[error("singular design matrix in least-squares fit")]
    SingularDesign,

    /// An engine failure annotated with where in the schedule it happened.
    #[error("chain {chain}, iteration {iteration}, column {column}: {source}")]
    ChainStep {
        chain: usize,
        iteration: usize,
        column: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
