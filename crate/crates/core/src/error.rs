use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not Hermitian (max |M - M^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace} (expected 1)")]
    InvalidTrace { trace: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unknown tensor factor `{0}`")]
    UnknownFactor(String),

    #[error("duplicate tensor factor `{0}`")]
    DuplicateFactor(String),

    #[error("factors {0:?} are not contiguous in the tensor product")]
    NonContiguousFactors(Vec<String>),

    #[error("partial trace must keep at least one factor")]
    EmptyKeep,

    #[error("work stroke of zero duration has no classical trajectory; use the sudden-quench path")]
    ZeroDuration,

    #[error("classical trajectory is at a focal point (|X(tau)| = {x_end:e}); perturb tau")]
    FocalPoint { x_end: f64 },

    #[error("{context} failed: deviation {deviation:e}")]
    NumericalFailure { context: &'static str, deviation: f64 },

    #[error("collision is off resonance: oscillator at {oscillator}, spin at {spin}")]
    FrequencyMismatch { oscillator: f64, spin: f64 },

    #[error("truncation health exceeded in {context}: deviation {deviation:e} > {limit:e}")]
    TruncationHealth {
        context: &'static str,
        deviation: f64,
        limit: f64,
    },

    #[error("no stationary cycle after {cycles} cycles (last trace distance {distance:e})")]
    NonConvergence { cycles: usize, distance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
