use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input intensity must be non-negative and finite, got {0}")]
    InvalidIntensity(f64),

    #[error("polarizer basis sign must be +1 or -1, got {0}")]
    InvalidSign(i32),

    #[error("detectors {0} and {1} belong to the same station; correlations are defined only across stations")]
    SameStationPair(char, char),

    #[error("sweep axis {axis}: {reason}")]
    InvalidAxis { axis: String, reason: String },

    #[error("sweep has no grid points")]
    EmptySweep,

    #[error("parameter {0} is given more than once in the sweep")]
    DuplicateParameter(String),

    #[error("mean photon number must be positive and finite, got {0}")]
    InvalidMeanPhotonNumber(f64),

    #[error("number of time bins must be positive")]
    ZeroTimeBins,

    #[error("number of streams must be positive")]
    ZeroStreams,

    #[error("no post-selected pairs; correlation estimate is undefined")]
    NoPostSelectedPairs,

    #[error("measured marginal for detector {0} is zero; cannot normalize")]
    ZeroMarginal(char),
}
