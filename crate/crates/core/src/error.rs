use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("magnitude overflow: {0}")]
    MagnitudeOverflow(String),

    #[error("series did not converge within {terms} terms (order {order}, argument {z})")]
    NoConvergenceWithinBudget { order: String, z: f64, terms: usize },

    #[error("no evaluation regime available: {0}")]
    RegimeUnavailable(String),

    #[error("catastrophic cancellation: estimated relative error {est:.3e}")]
    CatastrophicCancellation { est: f64 },

    #[error("too close to a pole: {0}")]
    PoleProximity(String),

    #[error("too close to a resonance: {0}")]
    ResonanceProximity(String),

    #[error("outside the supported branch sector: {0}")]
    BranchAmbiguity(String),

    #[error("derivative degenerates at the turning point")]
    TurningPoint,

    #[error("curve trace diverged at t = {t}")]
    TraceDivergence { t: f64 },

    #[error("lattice enumeration budget exceeded: {0}")]
    CutoffTooLarge(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("Newton iteration did not converge from seed {seed}")]
    NoConvergence { seed: String },

    #[error("Newton iterate escaped the basin around seed {seed}")]
    EscapedBasin { seed: String },

    #[error("contour passes too close to a zero: {0}")]
    BoundaryTooClose(String),

    #[error("evaluation budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("spectrum insufficient: {0}")]
    SpectrumInsufficient(String),

    #[error("zero found on the imaginary axis at nu = {0}")]
    ImaginaryAxisZero(String),

    #[error("quadrature did not converge: {0}")]
    UnconvergedQuadrature(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
