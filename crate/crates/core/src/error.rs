use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NdaError {
    #[error("configuration has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
    #[error("singular configuration: distance {0:e} at a Coulomb singularity")]
    Singular(f64),
    #[error("configuration is on the node (|psi| = {psi:e}, |grad psi| = {grad:e})")]
    NodeProximity { psi: f64, grad: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{0}` has no analytic node parametrization")]
    NoKnownNode(String),
    #[error("state `{0}` has no evaluable wave function")]
    NotEvaluable(String),
    #[error("state `{0}` cannot be reduced to a low-dimensional quadrature")]
    NotReducible(String),
    #[error("occupation k = {k} outside 1..={max} for l = {l}")]
    Occupation { k: u32, l: u32, max: u32 },
    #[error("invalid sampler configuration: {0}")]
    InvalidSampler(String),
    #[error("parameters off the analytic point: {0}")]
    OffAnalyticPoint(String),
    #[error("incompatible inputs: {0}")]
    Incompatible(String),
    #[error("denominator estimate is zero")]
    ZeroDenominator,
}

pub type Result<T> = core::result::Result<T, NdaError>;

pub(crate) fn invalid(msg: &str) -> NdaError {
    NdaError::InvalidParameter(String::from(msg))
}
