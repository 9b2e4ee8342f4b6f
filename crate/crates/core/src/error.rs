use thiserror::Error;

/// Domain errors raised across the crate.
///
/// Each variant has a stable machine-readable [`Error::name`] used by the
/// command-line error envelope.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cutoff too small: {0}")]
    CutoffTooSmall(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("beam splitter is not unitary: |t|^2 + |r|^2 = {0}")]
    NonUnitaryBeamSplitter(f64),
    #[error("degenerate splitter: {0}")]
    DegenerateSplitter(String),
    #[error("gain not allowed: |t| = {0} > 1")]
    GainNotAllowed(f64),
    #[error("singular P function: characteristic function reaches {0:e} at the lattice boundary")]
    SingularPFunction(f64),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("trust radius exceeded: |beta| = {radius} > {limit}")]
    TrustRadiusExceeded { radius: f64, limit: f64 },
    #[error("invalid efficiency: {0}")]
    InvalidEfficiency(f64),
    #[error("filter mismatch: {0}")]
    FilterMismatch(String),
    #[error("transform is not real: imaginary residue {0:e}")]
    NonRealTransform(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::CutoffTooSmall(_) => "CutoffTooSmall",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InvalidWeights(_) => "InvalidWeights",
            Error::InvalidState(_) => "InvalidState",
            Error::NonUnitaryBeamSplitter(_) => "NonUnitaryBeamSplitter",
            Error::DegenerateSplitter(_) => "DegenerateSplitter",
            Error::GainNotAllowed(_) => "GainNotAllowed",
            Error::SingularPFunction(_) => "SingularPFunction",
            Error::GridTooCoarse(_) => "GridTooCoarse",
            Error::TrustRadiusExceeded { .. } => "TrustRadiusExceeded",
            Error::InvalidEfficiency(_) => "InvalidEfficiency",
            Error::FilterMismatch(_) => "FilterMismatch",
            Error::NonRealTransform(_) => "NonRealTransform",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
