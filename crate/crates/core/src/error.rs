//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by signal construction, file I/O, filter design and the
/// denoising methods.
#[derive(Debug, Error)]
pub enum Error {
    #[error("signal length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    #[error("sampling rate mismatch: {left} Hz vs {right} Hz")]
    RateMismatch { left: f64, right: f64 },

    #[error("signal must contain at least one sample")]
    EmptySignal,

    #[error("sample {index} is not finite ({value})")]
    NonFiniteSample { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("requested window of {requested} samples does not fit a signal of {available}")]
    DegenerateWindow { requested: usize, available: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unsupported WFDB signal format code {0}")]
    UnsupportedFormat(u32),

    #[error("signal file {path} truncated: expected {expected} samples, decoded {actual}")]
    TruncatedSignal {
        path: String,
        expected: usize,
        actual: usize,
    },

    #[error("channel index {channel} out of range for {channels}-channel record")]
    ChannelOutOfRange { channel: usize, channels: usize },

    #[error("filter design infeasible: {0}")]
    DesignInfeasible(String),

    #[error("IIR filter numerically unstable at the requested specification")]
    UnstableFilter,

    #[error("need at least {needed} beats, got {got}")]
    InsufficientBeats { needed: usize, got: usize },

    #[error("beat window of {window} samples exceeds the minimum RR interval of {min_rr}")]
    BeatWindowTooLong { window: usize, min_rr: usize },

    #[error("no R peaks detected")]
    NoPeaksDetected,

    #[error("noise is identically zero; cannot normalize contamination level")]
    CannotNormalize,

    #[error("kurtosis undefined: sample variance is zero")]
    ZeroVariance,

    #[error("PRD undefined: denominator sum is zero")]
    UndefinedPrd,

    #[error("whitening impossible: {0}")]
    RankDeficient(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("wavelet level {level} infeasible for signal of {len} samples")]
    LevelInfeasible { level: usize, len: usize },

    #[error("unknown method {name:?}; valid methods: {valid}")]
    UnknownMethod { name: String, valid: String },

    #[error("unknown configuration key {0:?}")]
    UnknownConfigKey(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
