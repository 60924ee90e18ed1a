use thiserror::Error;

/// Errors raised by geometry, mapping, likelihood, and filter operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid geometries differ: {0}")]
    GeometryMismatch(String),

    #[error("voxel index {index} out of bounds (grid has {len} voxels)")]
    IndexOutOfBounds { index: u64, len: u64 },

    #[error("beam direction has norm {norm}, expected unit within {tol}")]
    NonUnitDirection { norm: f64, tol: f64 },

    #[error("beam radius {0} is negative")]
    NegativeRadius(f64),

    #[error("corridor position {position} out of range [0, {length})")]
    PositionOutOfRange { position: u64, length: u64 },

    #[error("invalid prior parameters for {model}: alpha={alpha}, beta={beta}")]
    InvalidPrior {
        model: &'static str,
        alpha: f64,
        beta: f64,
    },

    #[error("moment matching needs at least 2 values with positive variance")]
    DegenerateMoments,

    #[error("reflection map values must lie in [0, 1]; got {0}")]
    ValueOutOfRange(f64),

    #[error("belief and likelihood lengths differ: {belief} vs {likelihood}")]
    LengthMismatch { belief: usize, likelihood: usize },

    #[error("posterior mass is zero (all likelihoods vanished)")]
    ZeroMass,

    #[error("beam status {0} must go through out_of_range_log_prob, not beam_log_likelihood")]
    OutOfRangeBeam(&'static str),

    #[error("decay likelihood undefined: R + beta + r = 0 with delta = 1")]
    DegenerateDecay,

    #[error("all particle weights collapsed to zero")]
    WeightCollapse,

    #[error("no scans to evaluate (all beams excluded)")]
    EmptyEvaluation,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
