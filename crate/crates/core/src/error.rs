use num_complex::Complex64;
use thiserror::Error;

use crate::cnet::ActivationKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{kind:?} evaluated at {z} is within {distance:e} of a pole")]
    PoleProximity {
        kind: ActivationKind,
        z: Complex64,
        distance: f64,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("matrix is rank deficient (smallest singular value {smallest:e})")]
    RankDeficient { smallest: f64 },

    #[error("matrix is not unitary (max |U^H U - I| = {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("diffracted field vanishes at indices {indices:?}")]
    NearZeroDivisor { indices: Vec<usize> },

    #[error("bad IDX magic: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },

    #[error("truncated IDX file: needed {needed} bytes, found {found}")]
    TruncatedFile { needed: usize, found: usize },

    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
