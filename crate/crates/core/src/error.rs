use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LuError {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    WrongDimension { expected: usize, rows: usize, cols: usize },
    #[error("density matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("density matrix has negative eigenvalue {0:.3e}")]
    NotPositive(f64),
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("Bloch data is not a physical state (smallest eigenvalue {min_eigenvalue:.3e})")]
    NonPhysical { min_eigenvalue: f64 },
    #[error("matrix is not in SU(2)")]
    NotSpecialUnitary,
    #[error("matrix is not in SO(3)")]
    NotRotation,
    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },
    #[error("fingerprints are not comparable: {0}")]
    Incomparable(String),
}
