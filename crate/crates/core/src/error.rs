use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state vector has (near-)zero norm {norm:e}")]
    ZeroVector { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (‖X − X†‖_F = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not a projector (‖P² − P‖_F = {idempotence:e}, ‖P − P†‖_F = {hermiticity:e})")]
    NotProjector { idempotence: f64, hermiticity: f64 },

    #[error("Born probability {value} lies outside [0, 1] beyond clamp tolerance")]
    ProbabilityOutOfRange { value: f64 },

    #[error("packet width must be positive and finite, got {width}")]
    NonPositiveWidth { width: f64 },

    #[error("operation requires a {expected} packet")]
    WrongRepresentation { expected: &'static str },

    #[error("post-measurement width {sigma_bar} must exceed the current width {sigma}")]
    WidthNotIncreased { sigma: f64, sigma_bar: f64 },

    #[error("grid [{x_min}, {x_max}] does not cover {required} widths on each side of the packet center")]
    ExtentTooSmall { x_min: f64, x_max: f64, required: f64 },

    #[error("bad grid: {0}")]
    BadGrid(String),

    #[error("detection window [{lo}, {hi}] lies outside the grid [{x_min}, {x_max}]")]
    WindowOutsideGrid { lo: f64, hi: f64, x_min: f64, x_max: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("reports cannot be compared: {0}")]
    MismatchedReports(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
