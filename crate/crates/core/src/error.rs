use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum InpaintError {
    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("signal must have at least one sample")]
    EmptySignal,
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("negative magnitude {value} at index {index}")]
    NegativeMagnitude { index: usize, value: f64 },
    #[error("invalid gap mask: {0}")]
    InvalidMask(String),
    #[error("gap of {d} samples does not fit in a signal of length {len}")]
    GapTooLarge { d: usize, len: usize },
    #[error("gap is not a contiguous run modulo the signal length")]
    NonContiguousGap,
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("matrix is not Hermitian: entry ({row}, {col}) deviates by {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },
    #[error("leading eigenvector has a vanishing homogeneous entry ({magnitude:e})")]
    DegenerateHomogenization { magnitude: f64 },
    #[error("reference gap is identically zero, SER is undefined")]
    UndefinedReference,
    #[error("vector is identically zero")]
    ZeroVector,
}

impl InpaintError {
    /// True for errors that indicate a broken solver contract rather than bad input.
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            InpaintError::NotHermitian { .. } | InpaintError::DegenerateHomogenization { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, InpaintError>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(InpaintError::LengthMismatch {
            what,
            expected,
            got,
        })
    }
}
