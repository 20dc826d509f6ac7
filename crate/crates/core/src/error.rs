use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{what} of size {requested} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("matrix is not symmetric positive definite ({0})")]
    NotPositiveDefinite(&'static str),
    #[error("operator is zero")]
    ZeroOperator,
    #[error("conjugate gradients broke down at iteration {iteration}: negative curvature, lambda = {lambda} is too small")]
    RidgeBreakdown { iteration: usize, lambda: f64 },
    #[error("active-set system of size {active} is singular; increase the weights or use iterative regularization")]
    SingularActiveSystem { active: usize },
    #[error("active set of size {size} exceeds the cap of {cap}; the dense active-set solve is infeasible")]
    ActiveSetTooLarge { size: usize, cap: usize },
    #[error("iterate became non-finite at iteration {iteration}; step size is too large")]
    Divergence { iteration: usize },
    #[error("outer step {step} (mu = {mu}): {source}")]
    OuterStep {
        step: usize,
        mu: f64,
        #[source]
        source: Box<Error>,
    },
}
