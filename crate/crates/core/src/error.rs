use thiserror::Error;

/// Errors raised by the matrix kernels and the analysis modules built on them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is numerically rank deficient: smallest singular value {sigma_min:e} <= tolerance {tol:e}")]
    RankDeficient { sigma_min: f64, tol: f64 },

    #[error("columns are not orthonormal: max |A^T A - I| = {residual:e}")]
    NotOrthonormal { residual: f64 },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("C({n},{k}) = {count} subsets exceeds the enumeration cap {cap}")]
    EnumerationCapExceeded {
        n: usize,
        k: usize,
        count: u128,
        cap: u128,
    },

    #[error("invalid row set: {0}")]
    Index(String),

    #[error("component {name} = {value} is negative")]
    NegativeComponent { name: &'static str, value: f64 },

    #[error("invalid search parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
