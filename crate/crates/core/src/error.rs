use alloc::string::String;

/// Errors produced by the estimation library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a permutation of 1..={n}: {reason}")]
    InvalidPermutation { n: usize, reason: &'static str },

    #[error("element {element} is outside 1..={n}")]
    ElementOutOfRange { element: u32, n: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("n = {n} exceeds the exhaustive enumeration cap of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("second distribution has zero mass where the first does not")]
    SupportViolation,

    #[error("empty input: {0}")]
    Empty(&'static str),

    /// The spectral filter removed more mass than its corruption budget allows.
    #[error("filter divergence: removed mass {removed:.5} exceeds budget {budget:.5}")]
    FilterDivergence { removed: f64, budget: f64 },

    #[error("no hypothesis survived: {reason}")]
    NoHypothesis { reason: String },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
