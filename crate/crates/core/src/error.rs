use thiserror::Error;

/// Errors raised by the model engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sector overflow: closure exceeds the maximum dimension of {max_dim} basis states")]
    SectorOverflow { max_dim: usize },

    #[error("occupation vector has {got} modes, expected {expected}")]
    ModeCount { expected: usize, got: usize },

    #[error("mode index {mode} out of range for {mode_count} modes")]
    ModeIndex { mode: usize, mode_count: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("hop target lies outside the sector (sector closure violated)")]
    SectorClosure,

    #[error("operator is not Hermitian: max |H - H^dagger| = {defect:e}")]
    NotHermitian { defect: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("series order {requested} exceeds the limit of {limit}")]
    OrderLimit { requested: usize, limit: usize },

    #[error("resonant parameters (Phi = nu): use the resonant branch")]
    Resonant,

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("Krylov propagation failed to converge: {0}")]
    Krylov(String),
}

pub type Result<T> = std::result::Result<T, Error>;
