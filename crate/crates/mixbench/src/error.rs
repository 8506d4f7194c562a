//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A continuous column has zero range or zero variance where a positive
    /// one is required (standardization, range normalization, scaling).
    #[error("column {0} is constant; cannot standardize or range-normalize it")]
    ConstantColumn(usize),

    /// Two label vectors (or a label vector and a dataset) disagree in length.
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// Requested more clusters than there are observations (or zero clusters).
    #[error("cannot form {k} clusters from {n} observations")]
    KTooLarge { k: usize, n: usize },

    /// Every column of the input is constant, so no partition is identifiable.
    #[error("all columns are constant; clustering is not identifiable")]
    AllConstant,

    /// A covariance matrix is not symmetric positive definite.
    #[error("covariance matrix for component {0} is not positive definite")]
    NotPositiveDefinite(usize),

    /// The mixture calibration search could not reach the requested overlap.
    #[error("overlap calibration failed: {0}")]
    CalibrationFailed(String),

    /// Fewer positive singular values than requested factor dimensions.
    #[error("rank deficient: requested {requested} dimensions but rank is {rank}")]
    RankDeficient { requested: usize, rank: usize },

    /// A dissimilarity model was applied to data with a different schema.
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    /// A user-supplied weight must be strictly positive.
    #[error("weight for variable {0} must be strictly positive")]
    NonpositiveWeight(usize),

    /// A score vector is constant, so correlation ratios are undefined.
    #[error("score vector is constant; criterion is undefined")]
    ZeroVariance,

    /// Invalid configuration value (CLI flags, config file, or presets).
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    /// Malformed serialized data (dataset CSV, sidecar, records file).
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
