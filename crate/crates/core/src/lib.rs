//! Laplace–Beltrami spectra of flattening surfaces of revolution.
//!
//! The surface `S_ε` is the graph pair `x₃ = ±ε h(|x'|)` over the unit disk.
//! As `ε → 0` its spectrum collapses onto the union of the Dirichlet and
//! Neumann spectra of the disk, with corrections of order `ε² ln ε` and `ε²`.
//!
//! The crate is split along the pipeline:
//!
//! - [`numerics`]: quadrature, tridiagonal/dense symmetric eigensolvers,
//!   small least-squares fits.
//! - [`specfun`]: complete elliptic integral `E(m)`, Bessel `J_ν` and zeros.
//! - [`limit_spectrum`]: eigenpairs of the double-sided disk and their
//!   boundary traces.
//! - [`coeffs`]: the coefficient matrices `Λ⁽⁰⁾`, `Λ⁽¹⁾` and the
//!   three-term eigenvalue prediction.
//! - [`ellipse`]: the closed-form one-dimensional model.
//! - [`meridian`]: direct eigensolver on the surface via azimuthal Fourier
//!   reduction.
//! - [`harness`]: fits direct eigenvalues against the predicted coefficients.

pub mod coeffs;
pub mod ellipse;
pub mod error;
pub mod harness;
pub mod limit_spectrum;
pub mod meridian;
pub mod numerics;
pub mod specfun;

pub use error::{Error, Result};
