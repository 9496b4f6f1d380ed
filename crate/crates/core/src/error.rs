use thiserror::Error;

use crate::tensor::Variance;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension parameter n must be at least 1")]
    ZeroDimension,

    #[error("frame index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("slot {slot} out of range for a rank-{rank} tensor")]
    SlotOutOfRange { slot: usize, rank: usize },

    #[error("slot {0} appears in both the permuted and the excluded slot lists")]
    OverlappingSlots(usize),

    #[error("slot {slot} listed more than once")]
    DuplicateSlot { slot: usize },

    #[error("variance mismatch at slot {slot}: expected {expected:?}")]
    VarianceMismatch { slot: usize, expected: Variance },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("conjugate pair disagrees at {tuple:?} (|delta| = {delta:.3e})")]
    ConjugationConflict { tuple: Vec<usize>, delta: f64 },

    #[error("neither {tuple:?} nor its hat image is known")]
    CoverageGap { tuple: Vec<usize> },

    #[error("completion conflict at {tuple:?}: {existing} vs {incoming}")]
    CompletionConflict {
        tuple: Vec<usize>,
        existing: num_complex::Complex64,
        incoming: num_complex::Complex64,
    },

    #[error("structure data is not admissible: {0}")]
    Inadmissible(String),

    #[error("invalid tangent vector: {0}")]
    InvalidVector(String),

    #[error("frame change matrix is singular")]
    SingularFrameChange,

    #[error("{path}: {message}")]
    Manifest { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn manifest(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Manifest {
            path: path.into(),
            message: message.into(),
        }
    }
}
