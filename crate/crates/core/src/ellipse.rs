//! The one-dimensional model: the boundary of the ellipse with semi-axes
//! `1` and `ε`, whose Laplacian eigenvalues are `(2πk / L)²` with the
//! perimeter `L = 4 E(1 - ε²)`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::specfun::elliptic_e;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseModel {
    pub eps: f64,
    pub perimeter: f64,
}

impl EllipseModel {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::DomainError(format!("epsilon {eps} outside (0, 1]")));
        }
        Ok(Self {
            eps,
            perimeter: 4.0 * elliptic_e(1.0 - eps * eps)?,
        })
    }

    /// `(2πk / L)²`; each nonzero eigenvalue is double (cos and sin).
    pub fn eigenvalue(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::DomainError("k must be positive".into()));
        }
        Ok((2.0 * PI * f64::from(k) / self.perimeter).powi(2))
    }
}

pub fn exact_eigenvalue(k: u32, eps: f64) -> Result<f64> {
    EllipseModel::new(eps)?.eigenvalue(k)
}

/// `k²π²/4 + (k²π²/4) ε² ln ε + (k²π²/2)(1/4 - ln 2) ε²`.
pub fn expansion_eigenvalue(k: u32, eps: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::DomainError("k must be positive".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::DomainError(format!("epsilon {eps} outside (0, 1)")));
    }
    let (c0, c1, c2) = expansion_coefficients(k);
    Ok(c0 + c1 * eps * eps * eps.ln() + c2 * eps * eps)
}

/// Limit, `ε² ln ε` and `ε²` coefficients of the expansion.
pub fn expansion_coefficients(k: u32) -> (f64, f64, f64) {
    let base = (f64::from(k) * PI).powi(2) / 4.0;
    (base, base, 2.0 * base * (0.25 - LN_2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRow {
    pub eps: f64,
    pub exact: f64,
    pub expansion: f64,
    pub residual: f64,
    pub scaled_residual: f64,
}

/// One row per `ε`, in the order given. `residual = |exact - expansion|`,
/// `scaled_residual = residual / ε²`.
pub fn verify_expansion(k: u32, eps_list: &[f64]) -> Result<Vec<ExpansionRow>> {
    if eps_list.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "expansion check needs at least 2 epsilon values, got {}",
            eps_list.len()
        )));
    }
    eps_list
        .iter()
        .map(|&eps| {
            let exact = exact_eigenvalue(k, eps)?;
            let expansion = expansion_eigenvalue(k, eps)?;
            let residual = (exact - expansion).abs();
            Ok(ExpansionRow {
                eps,
                exact,
                expansion,
                residual,
                scaled_residual: residual / (eps * eps),
            })
        })
        .collect()
}
