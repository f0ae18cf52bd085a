use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: error estimate {estimate:e} above tolerance {tol:e} after {evaluations} evaluations")]
    NonConvergence {
        estimate: f64,
        tol: f64,
        evaluations: usize,
    },

    #[error("integrand returned a non-finite value at x = {at}")]
    NonFinite { at: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mass diagonal entry {index} is not strictly positive ({value})")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("matrix is not symmetric: |a_ij - a_ji| = {deviation:e}")]
    NotSymmetric { deviation: f64 },

    #[error("degenerate least-squares design: {0}")]
    DegenerateDesign(String),

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("invalid limit mode: {0}")]
    InvalidMode(String),

    #[error("no limit eigenvalue within tolerance of {target}")]
    EmptyGroup { target: f64 },

    #[error("reduced radial formula not available: {0}")]
    UnsupportedFamily(String),

    #[error("delta extrapolation unstable: error estimate {estimate:e} exceeds {tol:e}")]
    ExtrapolationUnstable { estimate: f64, tol: f64 },

    #[error("grid too coarse: N = {n} but at least {required} nodes needed")]
    GridTooCoarse { n: usize, required: usize },

    #[error("ambiguous pairing with limit spectrum: {0}")]
    AmbiguousPairing(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
