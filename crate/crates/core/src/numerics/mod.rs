//! Numerical kernels shared by the rest of the crate.
//!
//! Everything here is pure: no global state, safe to call from several
//! threads on disjoint inputs.

pub mod dense;
pub mod lsq;
pub mod quadrature;
pub mod tridiag;

pub use dense::{symmetric_eigen_dense, Matrix, SymmetricEigen};
pub use lsq::{
    extrapolate_sqrt_delta, fit_two_term, least_squares, LeastSquares, SqrtDeltaFit,
    SqrtDeltaSeries, TwoTermFit,
};
pub use quadrature::{
    integrate_adaptive, integrate_with, EndpointTransform, QuadratureOptions, QuadratureResult,
};
pub use tridiag::{tridiag_eigen_smallest, TridiagEigenpair, TridiagonalSystem};
