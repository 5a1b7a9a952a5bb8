use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion has zero magnitude; polar angles are undefined")]
    ZeroQuaternion,
    #[error("quaternion has a non-zero k component ({0}); not a monogenic value")]
    NotMonogenic(f64),
    #[error("field dimensions {0}x{1} are invalid (need at least 2x2)")]
    BadShape(usize, usize),
    #[error("field shapes differ: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("Poisson scale must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("rotation {0} rad needs resampling; sampled fields accept only quarter turns here")]
    UnsupportedRotation(f64),
    #[error("Laguerre order {0} exceeds the supported maximum of 12")]
    OrderTooLarge(usize),
    #[error("invalid wavelet parameters: {0}")]
    InvalidParams(String),
    #[error("admissibility quadrature did not converge (relative change {0:e})")]
    DivergentIntegral(f64),
    #[error("rendering window too small: {0:.3e} of the energy sits on the boundary")]
    WindowTooSmall(f64),
    #[error("hypergeometric series did not converge within {0} terms")]
    SeriesNonconvergent(usize),
    #[error("scale {scale} outside the admissible range [{min}, {max}]")]
    ScaleOutOfRange { scale: f64, min: f64, max: f64 },
    #[error("locality grid too coarse for reconstruction: {0}")]
    GridTooCoarse(String),
    #[error("invalid locality grid: {0}")]
    BadGrid(String),
    #[error("no ridge point exceeds the threshold")]
    NoRidge,
    #[error("wavelet kind not supported by this operation: {0}")]
    UnsupportedKind(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
