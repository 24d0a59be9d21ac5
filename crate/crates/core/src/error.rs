use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("value {value} outside support [{lo}, {hi}]")]
    OutsideSupport { value: f64, lo: f64, hi: f64 },
    #[error("reserve-price prior for owner {owner} is not regular near {theta}")]
    IrregularPrior { owner: usize, theta: f64 },
    #[error("{what} supports at most {max} owners, got {got}")]
    TooManyOwners { what: &'static str, max: usize, got: usize },
    #[error("incompatible input: {0}")]
    Incompatible(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
