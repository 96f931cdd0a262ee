use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix A is not positive definite (pivot {pivot:.3e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid problem file: {0}")]
    Parse(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("order {order} exceeds the configured cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },

    #[error("half-edges ({0}, {1}) are not a matched propagator pair")]
    NotAMatchedPair(usize, usize),

    #[error("insertion must be a truncated 2-external diagram of order >= 1")]
    NotTruncated,

    #[error("diagram is not one-particle irreducible")]
    NotOnePI,

    #[error("redundancy factor {counted} disagrees with symmetry-factor formula {formula}")]
    RedundancyMismatch { counted: u64, formula: u64 },

    #[error("no propagator assigned to edge ({0}, {1})")]
    MissingEdgeAssignment(usize, usize),

    #[error("cannot pair an odd number ({0}) of ids")]
    OddCount(usize),

    #[error("dimension {dim} exceeds quadrature limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("quadrature grid of {points} points exceeds the budget of {budget}")]
    GridBudgetExceeded { points: f64, budget: f64 },

    #[error("at least {min} samples are required, got {got}")]
    InsufficientSamples { min: usize, got: usize },

    #[error("screening matrix I + v(G o G)/2 is singular")]
    SingularScreening,

    #[error("matrix logarithm leaves the principal branch (eigenvalue {0:.3e})")]
    LogBranchFailure(f64),

    #[error("matrix is not symmetric positive definite")]
    NotSpd,

    #[error("Dyson iteration lost positivity at iteration {0}")]
    LostPositivity(usize),

    #[error("Dyson iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("finite-difference perturbation breaks positive definiteness at ({0}, {1})")]
    PerturbationBreaksSpd(usize, usize),

    #[error("ring series diverges (spectral radius {0:.4})")]
    DivergentSeries(f64),

    #[error("order-0 coefficient is not invertible")]
    SingularSeries,
}
