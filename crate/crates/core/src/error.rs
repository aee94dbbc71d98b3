use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the numerical core. Times and magnitudes are reported
/// as `f64` whatever the working scalar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite vector field value at t = {t}")]
    NonFiniteField { t: f64 },
    #[error("non-finite value in input")]
    NonFiniteInput,
    #[error("singular matrix (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("zero vector cannot be completed")]
    ZeroVector,
    #[error("submersion differential loses rank")]
    NotASubmersionHere,
    #[error("image is not contained in the level set (residual {residual:e})")]
    NotALevelSet { residual: f64 },
    #[error("singular diagonal block")]
    SingularBlock,
    #[error("no region contains the query point")]
    RegionNotFound,
    #[error("selected minor is singular")]
    SingularMinor,
    #[error("completed Jacobian is singular at a sample (det {det:e})")]
    DegenerateCompletion { det: f64 },
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("boundary not reached within flow horizon {horizon}")]
    NoBoundaryReached { horizon: f64 },
    #[error("point lies outside the extended image")]
    NotInImage,
    #[error("point lies outside the image of the immersion")]
    OutOfImage,
    #[error("submersion loses rank on the sublevel band")]
    RankDeficientBand,
    #[error("transversality fails at a sampled boundary point")]
    NotTransversal,
    #[error("no left inverse available")]
    NoLeftInverse,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("mode `{0}` is not supported by this scenario")]
    UnsupportedMode(String),
    #[error("invalid dimensions: {0}")]
    InvalidDimension(String),
}

impl Error {
    /// Short machine-readable tag, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFiniteField { .. } => "non-finite-field",
            Error::NonFiniteInput => "non-finite-input",
            Error::SingularMatrix { .. } => "singular-matrix",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InvalidGrid(_) => "invalid-grid",
            Error::NoSignChange { .. } => "no-sign-change",
            Error::RankDeficient => "rank-deficient",
            Error::ZeroVector => "zero-vector",
            Error::NotASubmersionHere => "not-a-submersion",
            Error::NotALevelSet { .. } => "not-a-level-set",
            Error::SingularBlock => "singular-block",
            Error::RegionNotFound => "region-not-found",
            Error::SingularMinor => "singular-minor",
            Error::DegenerateCompletion { .. } => "degenerate-completion",
            Error::NonPositiveArgument(_) => "non-positive-argument",
            Error::NoBoundaryReached { .. } => "no-boundary-reached",
            Error::NotInImage => "not-in-image",
            Error::OutOfImage => "out-of-image",
            Error::RankDeficientBand => "rank-deficient-band",
            Error::NotTransversal => "not-transversal",
            Error::NoLeftInverse => "no-left-inverse",
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::UnsupportedMode(_) => "unsupported-mode",
            Error::InvalidDimension(_) => "invalid-dimension",
        }
    }

    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
