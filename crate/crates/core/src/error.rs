use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("index out of domain: {0}")]
    Index(String),

    #[error("symmetrization requires positive-definite family ({0})")]
    NotPositiveDefinite(String),

    #[error("non-rational input: {0}")]
    NonRational(String),

    #[error("dimension must be at least {min}, got {got}")]
    Dimension { min: usize, got: usize },

    #[error("wrong case for family: {0}")]
    WrongCase(String),

    #[error("parameter outside domain: {0}")]
    ParameterDomain(String),

    #[error("a2 must be nonzero")]
    ZeroA2,

    #[error("oracle failure at degree {degree}: {detail}")]
    Oracle { degree: usize, detail: String },

    #[error("parse error: {0}")]
    Parse(String),
}
