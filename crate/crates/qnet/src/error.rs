use thiserror::Error;

/// Errors produced by the linear-algebra kernel and the model layers on top of it.
#[derive(Debug, Error)]
pub enum QnetError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("register too large: {0}")]
    SizeCap(String),
    #[error("matrix is not Hermitian (max deviation {deviation:.3e}, tolerance {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ill-conditioned attractor basis (Gram condition number {0:.3e})")]
    IllConditioned(f64),
    #[error("asymptotic limit is parity-dependent: a lambda = -1 attractor block is present")]
    ParityRequired,
    #[error("state is not a valid density matrix: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, QnetError>;
