use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the decomposition, simulation and evaluation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("series of length {len} is too short: at least {required} observations are needed{}", period.map(|p| format!(" for period {p}")).unwrap_or_default())]
    SeriesTooShort {
        len: usize,
        required: usize,
        period: Option<usize>,
    },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("all neighbourhood weights are zero when fitting at position {at}")]
    DegenerateNeighborhood { at: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("value {value} at index {index} is outside the Box-Cox domain for lambda {lambda}")]
    BoxCoxDomain { index: usize, value: f64, lambda: f64 },

    #[error("need at least {required} observed values, found {found}")]
    InsufficientObservations { required: usize, found: usize },

    #[error("decomposition has no seasonal component for period {0}")]
    MissingComponent(usize),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures caused by reading or writing files rather than by bad parameters.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Parse(_)
        )
    }
}

/// Returns an error naming the first non-finite entry of `values`.
pub(crate) fn ensure_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}
