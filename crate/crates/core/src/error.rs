use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model constants: {0}")]
    InvalidConstants(String),

    #[error("acceleration coefficient k{index} = {actual:e} does not match the derivation identity ({expected:e})")]
    KIdentity {
        index: usize,
        expected: f64,
        actual: f64,
    },

    #[error("invalid track geometry: {0}")]
    InvalidGeometry(String),

    #[error("time step must be positive and finite, got {0}")]
    NonPositiveStep(f64),

    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("time {t} ns is outside the trajectory span [{start}, {end}] ns")]
    OutOfSpan { t: f64, start: f64, end: f64 },

    #[error("no samples in window [{0}, {1}] ns")]
    EmptyWindow(f64, f64),

    #[error("invalid electrical parameters: {0}")]
    InvalidElectrical(String),

    #[error("position {x:e} m is outside the track [0, {length:e}] m")]
    OffTrack { x: f64, length: f64 },

    #[error("normalized position {0} is outside [0, 1]")]
    FractionOutOfRange(f64),

    #[error("terminal drive needs at least two driven nodes")]
    UnderDetermined,

    #[error("resistance {name} must be positive, got {value}")]
    ZeroResistance { name: &'static str, value: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("row {row}: magnetization profile has no wall (difference sum is zero)")]
    NoWall { row: usize },

    #[error("filename metadata: {0}")]
    Metadata(String),

    #[error("feature extraction: {0}")]
    Features(String),

    #[error("fit: {0}")]
    Fit(String),

    #[error("lookup table: {0}")]
    Table(String),

    #[error("corner {0} is not present in the lookup tables")]
    MissingCorner(String),

    #[error("comparison: {0}")]
    Metrics(String),

    #[error("benchmark: {0}")]
    Bench(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
