use thiserror::Error;

/// Errors raised by the solvers in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("operation `{op}` is not defined for the {geometry} geometry")]
    UnsupportedGeometry {
        op: &'static str,
        geometry: &'static str,
    },

    #[error("sample times are not strictly increasing at row {row}")]
    NonMonotonicTime { row: usize },

    #[error("at least {required} samples are needed, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("{modes} modes need at least {required} samples, only {available} available")]
    TooManyModes {
        modes: usize,
        required: usize,
        available: usize,
    },

    #[error("series has zero variance")]
    DegenerateSeries,

    #[error("waveform has no spectral content")]
    DegenerateWaveform,

    #[error("|z| = {modulus} exceeds the power-series cap {cap}")]
    ArgumentTooLarge { modulus: f64, cap: f64 },

    #[error("circle transfer function vanishes for mode m = {m}")]
    SingularTransferFunction { m: i32 },

    #[error("Bessel denominator vanishes for mode m = {m}")]
    SingularDenominator { m: i32 },

    #[error("banded system is singular (m = {m}, N = {cutoff}, J = {intervals}, pivot row {row})")]
    SolverSingular {
        m: i32,
        cutoff: usize,
        intervals: usize,
        row: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("reference mode n = 0 vanishes for m = {m}, N = {cutoff}")]
    DegenerateReference { m: i32, cutoff: usize },

    #[error("truncation thresholds not met up to N = {cap}")]
    NoConvergence { cap: usize },

    #[error("flux functional vanishes for mode m = {m} (|F| = {modulus:e})")]
    VanishingDenominator { m: i32, modulus: f64 },

    #[error("direct solve not periodic after {periods} periods (change {change:e})")]
    NotPeriodic { periods: usize, change: f64 },
}

impl Error {
    /// True for failures of the numerical method itself, as opposed to bad
    /// input or I/O.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ArgumentTooLarge { .. }
                | Error::SingularTransferFunction { .. }
                | Error::SingularDenominator { .. }
                | Error::SolverSingular { .. }
                | Error::DegenerateReference { .. }
                | Error::NoConvergence { .. }
                | Error::VanishingDenominator { .. }
                | Error::NotPeriodic { .. }
                | Error::DegenerateSeries
                | Error::DegenerateWaveform
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
