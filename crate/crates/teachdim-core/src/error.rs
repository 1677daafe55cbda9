use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("entries must be finite")]
    NonFinite,
    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,
    #[error("matrix is not positive semidefinite")]
    NotPsd,
    #[error("label {0} is not in {{-1, +1}}")]
    InvalidLabel(f64),
    #[error("lambda must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error("argument {arg} outside domain {domain}")]
    Domain { arg: f64, domain: &'static str },
    #[error("target weight vector must be nonzero")]
    ZeroTarget,
    #[error("scale parameter must be nonzero and finite")]
    InvalidScale,
    #[error("offset must be orthogonal to the weight vector")]
    OffsetNotOrthogonal,
    #[error("teaching-set constructions require the identity regularizer")]
    NonIdentityRegularizer,
    #[error("decision-boundary teaching is undefined for the squared loss")]
    BoundaryForRidge,
    #[error("bias must be present exactly when the learner is inhomogeneous")]
    BiasMismatch,
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("probe size {size} is not below the lower bound {bound}")]
    SizeNotBelowBound { size: usize, bound: usize },
    #[error("uniqueness probe needs at least 2 restarts")]
    TooFewRestarts,
    #[error("solver did not converge: {0}")]
    NoConvergence(&'static str),
    #[error("uniqueness probe inconclusive: {0}")]
    ProbeInconclusive(&'static str),
}

impl Error {
    /// Stable machine-readable code, used verbatim by the CLI error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NonFinite => "non_finite",
            Error::NotSymmetric => "not_symmetric",
            Error::NotPsd => "not_psd",
            Error::InvalidLabel(_) => "invalid_label",
            Error::InvalidLambda(_) => "invalid_lambda",
            Error::Domain { .. } => "domain_error",
            Error::ZeroTarget => "zero_target",
            Error::InvalidScale => "invalid_scale",
            Error::OffsetNotOrthogonal => "offset_not_orthogonal",
            Error::NonIdentityRegularizer => "non_identity_regularizer",
            Error::BoundaryForRidge => "boundary_for_ridge",
            Error::BiasMismatch => "bias_mismatch",
            Error::NotApplicable(_) => "not_applicable",
            Error::SizeNotBelowBound { .. } => "size_not_below_bound",
            Error::TooFewRestarts => "too_few_restarts",
            Error::NoConvergence(_) => "no_convergence",
            Error::ProbeInconclusive(_) => "probe_inconclusive",
        }
    }
}
