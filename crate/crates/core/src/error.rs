use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("resource guard exceeded: {what} = {value} > {limit}")]
    Guard { what: &'static str, value: f64, limit: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("points violate the admissible-set conditions at indices {0:?}")]
    Inadmissible(Vec<usize>),
    #[error("the zero function has no dominant coset")]
    ZeroFunction,
    #[error("quadrature did not converge (residual {residual:e})")]
    Quadrature { residual: f64 },
    #[error("eigen identity fails (residual {0:e})")]
    EigenIdentity(f64),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
