//! Special functions: complete elliptic integral of the second kind and
//! Bessel functions of the first kind with their zeros.

mod bessel;
mod elliptic;

pub use bessel::{
    bessel_j, bessel_j_deriv, bessel_zero, bessel_zeros_below, BesselZero, ZeroKind, MAX_ORDER,
};
pub(crate) use bessel::{bessel_j_orders, bessel_j_pair};
pub use elliptic::elliptic_e;
