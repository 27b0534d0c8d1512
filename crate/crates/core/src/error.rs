// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("loading {index} must be strictly positive (got {value})")]
    NonPositiveLoading { index: usize, value: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("change vector is zero")]
    ZeroChange,
    #[error("variance {index} must be strictly positive (got {value})")]
    NonPositiveVariance { index: usize, value: f64 },
    #[error("projection is degenerate: p'Sigma p = {0:e}")]
    DegenerateProjection(f64),
    #[error("zero variance estimate ({0:e})")]
    ZeroVariance(f64),
    #[error("CUSUM process vanishes identically")]
    AllZero,
    #[error("change is not proportional to the factor loadings (|cos| = {0})")]
    NotProportional(f64),
    #[error("factor contamination A_d = {0:e} is zero")]
    ZeroDependence(f64),
    #[error("price {index} is not strictly positive (got {value})")]
    NonPositivePrice { index: usize, value: f64 },
    #[error("series too short: need at least {needed}, got {found}")]
    TooShort { needed: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
