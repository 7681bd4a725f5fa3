use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit reports. [`Error::name`] gives a stable
/// identifier that the command-line front end prints on standard error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("field angle {theta} rad outside [0, pi/2]")]
    ThetaOutOfRange { theta: f64 },

    #[error("distorted angle {theta_d} rad outside [0, {max}]")]
    ThetaDOutOfRange { theta_d: f64, max: f64 },

    #[error("distortion map is not strictly increasing at grid index {index}")]
    MonotonicityViolation { index: usize },

    #[error("point is behind the camera (z = {z} m)")]
    BehindCamera { z: f64 },

    #[error("field angle {theta} rad exceeds pi/2")]
    FieldOfViewExceeded { theta: f64 },

    #[error("depth must be positive, got {depth} m")]
    NonPositiveDepth { depth: f64 },

    #[error("invalid camera: {0}")]
    InvalidCamera(String),

    #[error("invalid crop: top {top} + bottom {bottom} must be below image height {height}")]
    InvalidCrop { top: u32, bottom: u32, height: u32 },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: Vec<usize>, found: Vec<usize> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown camera id `{0}`")]
    UnknownCamera(String),

    #[error("calibration: {0}")]
    Calibration(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("no ground truth for the requested metric")]
    NoGroundTruth,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::ThetaOutOfRange { .. } => "ThetaOutOfRange",
            Error::ThetaDOutOfRange { .. } => "ThetaDOutOfRange",
            Error::MonotonicityViolation { .. } => "MonotonicityViolation",
            Error::BehindCamera { .. } => "BehindCamera",
            Error::FieldOfViewExceeded { .. } => "FieldOfViewExceeded",
            Error::NonPositiveDepth { .. } => "NonPositiveDepth",
            Error::InvalidCamera(_) => "InvalidCamera",
            Error::InvalidCrop { .. } => "InvalidCrop",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::UnknownCamera(_) => "UnknownCamera",
            Error::Calibration(_) => "CalibrationError",
            Error::Format(_) => "FormatError",
            Error::NoGroundTruth => "NoGroundTruth",
            Error::Io(_) => "IoError",
            Error::Json(_) => "FormatError",
        }
    }
}
