use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dense ensemble needs {requested} bytes, budget is {budget} bytes")]
    Capacity { requested: u128, budget: u128 },

    #[error("operation requires the ground-truth signal")]
    MissingTruth,

    #[error("operation not supported for {0} ensembles")]
    UnsupportedEnsemble(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("derivative undefined on the boundary y1 = 0 or y2 = 0")]
    Boundary,

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
