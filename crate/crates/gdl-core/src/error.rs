use thiserror::Error;

/// Failure modes surfaced by the laboratory.
///
/// `Input` covers malformed or out-of-domain user data (bad tensors, points
/// outside the feasible set, unknown names); `Numerical` covers algorithmic
/// breakdowns on well-formed input (singular Jacobians, divergence, empty
/// certificates). Front ends map these to distinct process exit codes.
#[derive(Debug, Error)]
pub enum GdlError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl GdlError {
    pub fn input(msg: impl Into<String>) -> Self {
        GdlError::Input(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        GdlError::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, GdlError>;
