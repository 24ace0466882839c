use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The on-sphere turning radius ratio is outside the range with a known
    /// candidate list.
    #[error("unsupported normalized turning radius {r_hat:.6} (must be in (0, sqrt(3)/2])")]
    UnsupportedRadius { r_hat: f64 },

    /// A sub-problem (one sphere, one surface) has no solution for the given
    /// boundary data.
    #[error("infeasible sub-problem: {0}")]
    InfeasibleSubproblem(String),

    /// The geometry needed by a path class does not exist for this pairing.
    #[error("path class infeasible: {0}")]
    ClassInfeasible(String),

    #[error("no feasible path found in any class")]
    PlannerInfeasible,

    #[error("parse error in {location}: {message}")]
    Parse { location: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
