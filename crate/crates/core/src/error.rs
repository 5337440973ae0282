use thiserror::Error;

/// Errors produced by the curvecomm library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid pair ({i}, {j}): {reason}")]
    InvalidPair { i: usize, j: usize, reason: String },

    /// The pair does not satisfy the bilateral tangent-orthogonality condition
    /// required by the matched pairwise expectation formula.
    #[error(
        "pair ({i}, {j}) is not phantom: the matched formula needs a chord orthogonal to both \
         tangents, got |d.t_i| = {proj_i:.3e}, |d.t_j| = {proj_j:.3e}"
    )]
    NotPhantom {
        i: usize,
        j: usize,
        proj_i: f64,
        proj_j: f64,
    },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("singular noise model: {0}")]
    SingularModel(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
