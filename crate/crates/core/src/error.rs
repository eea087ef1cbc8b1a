use thiserror::Error;

/// Errors raised by the time-frequency routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("parameter `{name}` out of range: {detail}")]
    OutOfRange { name: &'static str, detail: String },

    #[error("shift x = {x} exceeds the grid half-extent {half_extent}")]
    ShiftTooLarge { x: f64, half_extent: f64 },

    #[error("lattice incompatible with grid: {0}")]
    LatticeGrid(String),

    #[error("window under-resolved: only {samples} samples above 1e-12 of peak")]
    UnderResolved { samples: usize },

    #[error("unsupported derivative order {order} (max {max})")]
    DerivativeOrder { order: usize, max: usize },

    #[error("symbol parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("symbol not in class: seminorm {seminorm} diverges")]
    NotInClass { seminorm: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("operation needs complex entries but the matrix holds magnitudes only")]
    MagnitudeOnly,

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{name} = {v}")))
    }
}
