use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("{what}: frequency {freq} exceeds the Nyquist limit {nyquist}")]
    Nyquist {
        what: &'static str,
        freq: u64,
        nyquist: u64,
    },

    #[error("accuracy budget exceeded in {what}: estimated error {estimate:.3e} > tolerance {tolerance:.3e}")]
    AccuracyBudget {
        what: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
