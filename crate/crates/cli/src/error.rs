use thiserror::Error;

use fockmarket_core::Error as CoreError;

/// Exit status for validation problems (bad scenario, unknown model, overflow).
pub const EXIT_INVALID: i32 = 2;
/// Exit status when a conserved quantity drifts beyond tolerance.
pub const EXIT_CONSERVATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown model '{0}' (expected one of model1, model2, meanfield, meanfield-appendix2, kms)")]
    UnknownModel(String),
    #[error("malformed scenario: {0}")]
    Malformed(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("sector overflow: {0}")]
    Overflow(String),
    #[error("{0} is not supported for this model; its conservation laws hold analytically")]
    Unsupported(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Compute(_) | Self::Io(_) => 1,
            _ => EXIT_INVALID,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::SectorOverflow { max_dim } => Self::Overflow(format!(
                "closure exceeds {max_dim} basis states; raise FOCKMARKET_MAX_DIM to allow larger sectors"
            )),
            CoreError::Krylov(_) | CoreError::Undefined(_) | CoreError::NotHermitian { .. } => {
                Self::Compute(err.to_string())
            }
            _ => Self::Invalid(err.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
