use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} did not converge within its iteration budget")]
    NonConvergence(&'static str),
    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("every column was dropped during orthonormalization")]
    EmptyBasis,
    #[error("x^H Φ x vanishes; the oblique projector is undefined")]
    DegenerateProjector,
    #[error("vector is outside the Rayleigh functional domain")]
    NotInDomain,
    #[error("assumption violated: {0}")]
    AssumptionViolated(&'static str),
    #[error("projected problem has no proper eigenvalue in the interval")]
    NoRitzValue,
    #[error("preconditioner breakdown: nonpositive curvature {0:e} in inner CG")]
    PreconditionerBreakdown(f64),
    #[error("no admissible starting vector after {0} draws")]
    NoAdmissibleStart(usize),
    #[error("operator has no strictly positive eigenvalues")]
    DegenerateSpectrum,
    #[error("condition ratio must be at least 1, got {0}")]
    InvalidKappa(f64),
    #[error("steepest-descent rate must lie in [0, 1], got {0}")]
    InvalidEta(f64),
    #[error("no trace entries fall inside the asymptotic window")]
    EmptyWindow,
    #[error("spectrum does not define a hyperbolic problem: {0}")]
    NotHyperbolic(&'static str),
    #[error("generated pencil failed definiteness certification")]
    NotDefinite,
    #[error("shift {0} is numerically an eigenvalue")]
    OnEigenvalue(f64),
    #[error("invalid bisection bracket ({lo}, {hi})")]
    BadBracket { lo: f64, hi: f64 },
    #[error("problem too large for the dense oracle (n*m = {0})")]
    TooLarge(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
