use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("elements are not composable: source {source_bits:#b} != target {target_bits:#b}")]
    NotComposable { source_bits: u64, target_bits: u64 },

    #[error("prefix depth mismatch: {left} vs {right}")]
    DepthMismatch { left: usize, right: usize },

    #[error("depth {actual} too small, at least {required} needed")]
    DepthTooSmall { required: usize, actual: usize },

    #[error("horizon {required} exceeds the depth cap {cap}")]
    HorizonOverflow { required: usize, cap: usize },

    #[error("invalid measure: {0}")]
    InvalidSpec(String),

    #[error("site {site} out of range for a chain of {n} sites")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("cochain differential of order {0} is not supported")]
    OrderUnsupported(usize),

    #[error("spectrum is degenerate at lambda = 1/2")]
    DegenerateSpectrum,

    #[error("operation requires a {0} measure")]
    WrongMeasure(&'static str),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
