use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Diagnostic magnitudes are carried as `f64` regardless of the scalar type
/// the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point outside the closed annulus: {0}")]
    Domain(String),

    #[error("aliasing: {samples} samples cannot resolve frequency order {order} (need at least {needed})")]
    Aliasing {
        samples: usize,
        order: usize,
        needed: usize,
    },

    #[error("peak point {index} is not on the boundary of the annulus (|a| = {modulus})")]
    InvalidPeakPoint { index: usize, modulus: f64 },

    #[error("resource limit: {requested} atoms requested, cap is {cap}")]
    ResourceLimit { requested: u128, cap: usize },

    #[error("truncation order {order} overflows the radial profile for r = {r}")]
    TruncationOrder { order: usize, r: f64 },

    #[error("invalid rational function: {0}")]
    InvalidRational(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("denominator is singular on the spectrum (smallest singular value {sigma_min:e})")]
    PoleOnSpectrum { sigma_min: f64 },

    #[error("precondition failed: {what} (witness {witness:e})")]
    Precondition { what: String, witness: f64 },

    #[error("not an A_r-unitary: eigenvalue moduli {offending:?} are off both circles")]
    NotArUnitary { offending: Vec<f64> },

    #[error("the annulus kernel diverges at boundary point |w| = {modulus}")]
    BoundaryKernel { modulus: f64 },

    #[error("not an A_r-contraction: {0}")]
    NotContraction(String),

    #[error("positivity violation: operator {atom} has eigenvalue {min_eigenvalue:e}")]
    PositivityViolation { atom: usize, min_eigenvalue: f64 },

    #[error("matrices {i} and {j} are not doubly commuting (commutator norm {norm:e})")]
    NotDoublyCommuting { i: usize, j: usize, norm: f64 },

    #[error("inconsistent structure: {0}")]
    Inconsistent(String),

    #[error("numerical routine failed to converge: {0}")]
    NoConvergence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
