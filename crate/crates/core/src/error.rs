use num_complex::Complex64;
use thiserror::Error;

/// Failure modes of the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate twist: q^({twist}+2k) = q^-({twist}+2k) for k = {mode}")]
    DegenerateTwist { twist: Complex64, mode: i64 },
    #[error("poles of the weight function collide at z = {0}")]
    PoleCollision(Complex64),
    #[error("no spectral gap in the sector: |λ2/λ1| = {0}")]
    NoGap(f64),
    #[error("{what} did not converge after {iterations} iterations")]
    NotConverged { what: &'static str, iterations: usize },
    #[error("Baxter nullspace has dimension {0}, expected 1")]
    DegenerateNullspace(usize),
    #[error("Wronskian mismatch, relative residual {0:e}")]
    WronskianMismatch(f64),
    #[error("period matrix is singular (reciprocal condition {0:e})")]
    SingularPeriodMatrix(f64),
    #[error("sampling radius {radius} reaches a singularity at distance {distance}")]
    RadiusTooLarge { radius: f64, distance: f64 },
    #[error("conjugating monodromy is singular")]
    SingularConjugation,
    #[error("square-root branch lost near z = {0}")]
    BranchTrackingLost(Complex64),
    #[error("truncated oscillator trace diverges: |q^(2λ)| = {0}")]
    TraceDivergent(f64),
    #[error("evaluation point hits a pole at ζ² = {0}")]
    PoleHit(Complex64),
    #[error("interpolated transfer eigenvalue misses the held-out node by {0:e}")]
    InterpolationInconsistent(f64),
    #[error("sector {0} is empty")]
    EmptySector(i64),
    #[error("evaluation point hits a zero of the transfer eigenvalue at z = {0}")]
    TransferZero(Complex64),
    #[error("branch point {0} cannot be assigned to a unique cut")]
    RootClusterAmbiguous(Complex64),
    #[error("quadrature changed by {0:e} under node doubling")]
    QuadratureNotConverged(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
