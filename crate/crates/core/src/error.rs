//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced while building meshes, assembling operators, solving
/// linear systems, or driving the time stepper.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("subdivision count must be at least 1")]
    ZeroSubdivision,

    #[error("unsupported quadrature degree {requested} (supported range 1..={max})")]
    UnsupportedQuadratureDegree { requested: usize, max: usize },

    #[error("hydraulic conductivity tensor is not symmetric positive definite")]
    NonSpdConductivity,

    #[error("interface pair {pair} has geometrically mismatched edges")]
    InterfaceMismatch { pair: usize },

    #[error("matrix is singular (zero pivot at row {row})")]
    Singular { row: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("AMB2 parameter alpha = {alpha} outside the admissible range (1/2, 1)")]
    AlphaOutOfRange { alpha: f64 },

    #[error("time levels are not consecutive: expected spacing {dt}, got {got}")]
    NonConsecutiveLevels { dt: f64, got: f64 },

    #[error("final time {t_final} is not an integer multiple of dt = {dt}")]
    NonIntegralStepCount { t_final: f64, dt: f64 },

    #[error("non-finite state detected at step {step}")]
    NonFinite { step: usize },

    #[error("solver failed at step {step}: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("config file {path}, line {line}: {msg}")]
    ConfigFile {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
