use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("empty domain: {0}")]
    EmptyDomain(String),

    #[error("field and operator live on different domains")]
    DomainMismatch,

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("fractional exponent s = {0} outside (0, 1)")]
    InvalidExponent(f64),

    #[error("kernel support box ({support} cells) does not cover the grid ({required} cells)")]
    KernelSupport { support: usize, required: usize },

    #[error("operator is not positive definite: {0}")]
    Indefinite(String),

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
