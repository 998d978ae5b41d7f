use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FinslerError {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("Riemannian field invariant violated: {0}")]
    RiemannianField(String),
    #[error("OneFormField invariant violated: {0}")]
    OneFormField(String),
    #[error("phi profile invalid: {0}")]
    PhiProfile(String),
    #[error("inadmissible sample: {0}")]
    InadmissibleSample(String),
    #[error("non-positive value: {0}")]
    NonPositiveValue(String),
    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),
    #[error("fundamental tensor not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("no admissible direction at base point {0:?}")]
    EmptyFiber(Vec<f64>),
    #[error("finite-difference step underflow: {0}")]
    StepUnderflow(String),
    #[error("mean Cartan torsion too small for a semi-C fit (|I|^2 = {0:e})")]
    RiemannianDegenerate(f64),
    #[error("semi-C fit is ill-posed in dimension {0} (needs n >= 3)")]
    FitIllPosed(usize),
    #[error("quantity is not 0-homogeneous (deviation {0:e})")]
    NotHomogeneous(f64),
    #[error("family Jacobian is rank deficient (smallest singular value {0:e})")]
    RankDeficient(f64),
    #[error("parameter left the admissible box: {0}")]
    BoundsExceeded(String),
    #[error("flow extinct: t = {t} >= t* = {extinction}")]
    Extinct { t: f64, extinction: f64 },
    #[error("probe deformation inadmissible: {0}")]
    ProbeStepInvalid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, FinslerError>;
