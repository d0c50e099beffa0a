use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("atoms and probabilities differ in length ({atoms} vs {probs})")]
    LengthMismatch { atoms: usize, probs: usize },
    #[error("a distribution needs at least one atom")]
    Empty,
    #[error("negative probability {0}")]
    NegativeProbability(f64),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("operation `{op}` is not supported for {variant} laws")]
    Unsupported { op: &'static str, variant: &'static str },
    #[error("distribution is not symmetric about zero")]
    NotSymmetric,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("coefficient vector is zero")]
    DegenerateCoefficients,
    #[error("exact convolution needs {needed} atom pairs, over the budget of {cap}")]
    AtomBudget { needed: usize, cap: usize },
    #[error("quadrature did not converge within {0} subdivisions")]
    Quadrature(usize),
    #[error("characteristic function is negative ({value:e}) at t = {t}; the nonnegativity hypothesis fails")]
    Hypothesis { t: f64, value: f64 },
    #[error("Lipschitz search exceeded {0} evaluations")]
    SearchBudget(usize),
    #[error("invalid specification: {0}")]
    Spec(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
