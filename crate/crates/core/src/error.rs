use thiserror::Error;

/// Errors raised by the sieve pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator {index} is not Hermitian (defect {defect:.3e})")]
    NotHermitian { index: usize, defect: f64 },
    #[error("generator basis is degenerate (Gram condition number {condition:.3e})")]
    DegenerateBasis { condition: f64 },
    #[error("commutator [X_{i}, X_{j}] leaves the generator span (residual {residual:.3e})")]
    NotClosed { i: usize, j: usize, residual: f64 },
    #[error("structure constants violate the Jacobi identity (residual {residual:.3e})")]
    JacobiViolated { residual: f64 },
    #[error("structure constants are not antisymmetric in their first two indices")]
    NotAntisymmetricPair,
    #[error("Killing form is not definite (signature {pos}+ {neg}- {zero}0); pass assume_orthogonal_adjoint to accept")]
    IndefiniteMetric { pos: usize, neg: usize, zero: usize },
    #[error("ad matrix is not antisymmetric (defect {defect:.3e}); normalize the basis first")]
    NotAntisymmetric { defect: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("spectral density has no cutoff; {0} is not available in closed form")]
    NoCutoff(&'static str),
    #[error("zero-frequency diffusion D0 diverges (sub-Ohmic oscillator bath) but its multiplier is nonzero")]
    DivergentD0,
    #[error("invalid bath parameter: {0}")]
    InvalidBath(String),
    #[error("no optimizer run converged ({starts} starts)")]
    NoConvergence { starts: usize },
    #[error("2j must be a nonnegative integer, got j = {0}")]
    BadSpin(f64),
    #[error("gamma/D = {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("integrator step too large: step-doubling error {error:.3e} at t = {time}")]
    StepTooLarge { error: f64, time: f64 },
    #[error("Fock truncation {0} too small (need at least 4)")]
    TruncationTooSmall(usize),
    #[error("state occupies the top Fock levels (weight {0:.3e})")]
    EdgeOccupation(f64),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
