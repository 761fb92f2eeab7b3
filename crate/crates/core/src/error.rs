use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A feature row or model disagrees on the number of features.
    DimensionMismatch { expected: usize, found: usize },
    /// A per-sample vector (weights, losses, labels) has the wrong length.
    LengthMismatch { expected: usize, found: usize },
    EmptyDataset,
    NonFiniteFeature { row: usize, column: usize },
    InvalidLoss(f64),
    InvalidParameter(String),
    /// Every sample carries zero weight, so no weak learner can be fitted.
    ZeroTotalWeight,
    /// The self-paced weights rejected every sample during an outer round.
    AllRejected { round: usize },
    NonFiniteWeights { round: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected {expected} features, found {found}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected a vector of length {expected}, found {found}")
            }
            Error::EmptyDataset => f.write_str("dataset has no samples or no features"),
            Error::NonFiniteFeature { row, column } => {
                write!(f, "non-finite feature value at row {row}, column {column}")
            }
            Error::InvalidLoss(loss) => {
                write!(f, "loss must be finite and non-negative, got {loss}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::ZeroTotalWeight => f.write_str("sample weights sum to zero"),
            Error::AllRejected { round } => write!(
                f,
                "round {round}: lambda rejected all samples (sum of v_i * w_i is zero)"
            ),
            Error::NonFiniteWeights { round } => {
                write!(f, "round {round}: boosting weights became non-finite")
            }
        }
    }
}

impl core::error::Error for Error {}
