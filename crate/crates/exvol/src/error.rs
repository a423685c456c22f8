use thiserror::Error;

/// Errors produced by the invariant computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric: max |M - M^t| entry is {0:e}")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("class is not totally real")]
    NotTotallyReal,

    #[error("no totally real class found within coefficient bound {0}")]
    EmptySearch(i64),

    #[error("inadmissible input: {0}")]
    Inadmissible(String),

    #[error("matrix is not unimodular: integer determinant is {0}")]
    NotUnimodular(i128),

    #[error("reduction did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
