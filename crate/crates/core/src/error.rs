use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("evaluation point {0} coincides with a pole")]
    Pole(String),
    #[error("evaluation point {0} lies on the boundary; use boundary values instead")]
    BoundaryPoint(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular configuration: {0}")]
    Singular(String),
    #[error("support collision: {0}")]
    SupportCollision(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("not a renormalizable representation: {0}")]
    NotRenormalizable(String),
    #[error("boundary values did not converge at {} point(s)", points.len())]
    PartialResult { points: Vec<usize> },
    #[error("config error at {field}: {message}")]
    Config { field: String, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("eigen solver failure: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}
