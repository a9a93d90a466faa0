use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("matrix is not unitary (max deviation of U†U from I is {0:e})")]
    NotUnitary(f64),

    #[error("reference state is ill-conditioned: smallest eigenvalue {0:e}")]
    IllConditioned(f64),

    #[error("inverse temperature must be positive and finite, got {0}")]
    InvalidBeta(f64),

    #[error("index {index} out of range for {len} levels")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation leak: population {population:e} in the top {levels} Fock levels")]
    TruncationLeak { population: f64, levels: usize },

    #[error("free-energy bound violated: {0}")]
    BoundViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
