use thiserror::Error;

use crate::interval::DomainError;
use crate::transversality::TransversalityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),

    /// The fast partial `∂ₓf` could not be bounded away from zero.
    #[error("fold: ∂x f encloses zero ({context})")]
    Fold { context: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },

    /// The x-component of a face normal is not sign-definite.
    #[error("face normal x-component straddles zero near a fold: [{lo:e}, {hi:e}]")]
    FoldProximity { lo: f64, hi: f64 },

    #[error("transversality could not be verified down to N = {last_n:e}")]
    VerificationFailure {
        last_n: f64,
        left: Box<TransversalityReport>,
        right: Box<TransversalityReport>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
