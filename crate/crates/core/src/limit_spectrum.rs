//! The limit problem on the double-sided unit disk.
//!
//! A function on the double-sided disk is a pair `(ψ₊, ψ₋)` glued along the
//! circle. Its eigenfunctions split into Dirichlet modes `(ψ, -ψ)` and
//! Neumann modes `(ψ, ψ)`, so the spectrum is the union of the two disk
//! spectra. Everything is separated as `C · J_ν(κ r) · Θ(θ)`.
//!
//! Normalization is in `L₂` of the double-sided domain: `2 ∫_ω ψ² = 1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::numerics::Matrix;
use crate::specfun::{bessel_j_pair, bessel_zero, bessel_zeros_below, ZeroKind, MAX_ORDER};
use crate::{Error, Result};

/// Default relative tolerance when collecting a degenerate group.
pub const DEFAULT_GROUP_TOL: f64 = 1e-9;

/// Largest `count` accepted by [`limit_eigenvalues`].
pub const MAX_LIMIT_COUNT: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    /// `ψ₋ = sign · ψ₊`.
    pub fn lower_side_sign(self) -> f64 {
        match self {
            Self::Dirichlet => -1.0,
            Self::Neumann => 1.0,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Self::Dirichlet => "D",
            Self::Neumann => "N",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dirichlet => "dirichlet",
            Self::Neumann => "neumann",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(Self::Dirichlet),
            "neumann" | "n" => Ok(Self::Neumann),
            other => Err(Error::InvalidInput(format!(
                "unknown boundary condition '{other}' (expected dirichlet or neumann)"
            ))),
        }
    }
}

/// Angular dependence of a separated eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "order")]
pub enum AngularFactor {
    Constant,
    Cos(u32),
    Sin(u32),
}

impl AngularFactor {
    pub fn order(self) -> u32 {
        match self {
            Self::Constant => 0,
            Self::Cos(n) | Self::Sin(n) => n,
        }
    }

    pub fn value(self, theta: f64) -> f64 {
        match self {
            Self::Constant => 1.0,
            Self::Cos(n) => (f64::from(n) * theta).cos(),
            Self::Sin(n) => (f64::from(n) * theta).sin(),
        }
    }

    pub fn derivative(self, theta: f64) -> f64 {
        match self {
            Self::Constant => 0.0,
            Self::Cos(n) => -f64::from(n) * (f64::from(n) * theta).sin(),
            Self::Sin(n) => f64::from(n) * (f64::from(n) * theta).cos(),
        }
    }

    /// `∫₀^{2π} Θ_a Θ_b dθ`.
    pub fn overlap(a: Self, b: Self) -> f64 {
        match (a, b) {
            (Self::Constant, Self::Constant) => 2.0 * PI,
            (Self::Cos(n), Self::Cos(m)) | (Self::Sin(n), Self::Sin(m)) if n == m && n > 0 => PI,
            _ => 0.0,
        }
    }

    /// `∫₀^{2π} Θ_a' Θ_b' dθ`.
    pub fn derivative_overlap(a: Self, b: Self) -> f64 {
        match (a, b) {
            (Self::Cos(n), Self::Cos(m)) | (Self::Sin(n), Self::Sin(m)) if n == m && n > 0 => {
                f64::from(n) * f64::from(n) * PI
            }
            _ => 0.0,
        }
    }
}

/// Which member of a `cos`/`sin` pair to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngularPart {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskEigenpair {
    pub bc: BoundaryCondition,
    pub nu: u32,
    pub k: u32,
    /// Zero location; `0` only for the Neumann constant mode.
    pub kappa: f64,
    pub lambda: f64,
    pub angular: AngularFactor,
    /// `C` in `ψ₊ = C J_ν(κ r) Θ(θ)`. Signed.
    pub radial_norm_const: f64,
}

impl DiskEigenpair {
    pub fn is_constant_mode(&self) -> bool {
        self.kappa == 0.0
    }

    /// Radial part `R(r) = C J_ν(κ r)` and `R'(r)`.
    pub fn radial(&self, r: f64) -> (f64, f64) {
        if self.is_constant_mode() {
            return (self.radial_norm_const, 0.0);
        }
        let (j, dj) = bessel_j_pair(self.nu, self.kappa * r);
        (self.radial_norm_const * j, self.radial_norm_const * self.kappa * dj)
    }

    /// `ψ₊(r, θ)`.
    pub fn upper(&self, r: f64, theta: f64) -> f64 {
        self.radial(r).0 * self.angular.value(theta)
    }

    /// `ψ₋(r, θ)`.
    pub fn lower(&self, r: f64, theta: f64) -> f64 {
        self.bc.lower_side_sign() * self.upper(r, theta)
    }
}

/// The `k`-th zero `κ` for the given family. Neumann `ν = 0, k = 1` is the
/// constant mode, so later Neumann `ν = 0` indices are shifted by one.
fn zero_for(bc: BoundaryCondition, nu: u32, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidMode("radial index k starts at 1".into()));
    }
    if nu > MAX_ORDER {
        return Err(Error::InvalidMode(format!("angular mode {nu} exceeds {MAX_ORDER}")));
    }
    let z = match (bc, nu) {
        (BoundaryCondition::Dirichlet, _) => bessel_zero(nu, k, ZeroKind::J),
        (BoundaryCondition::Neumann, 0) if k == 1 => return Ok(0.0),
        (BoundaryCondition::Neumann, 0) => bessel_zero(0, k - 1, ZeroKind::JPrime),
        (BoundaryCondition::Neumann, _) => bessel_zero(nu, k, ZeroKind::JPrime),
    };
    z.map(|z| z.location)
        .map_err(|e| Error::InvalidMode(e.to_string()))
}

/// Normalized eigenpair for `(bc, ν, k)`; `angular` picks `cos νθ` or
/// `sin νθ` and must be `Cos` when `ν = 0`.
pub fn eigenpair(
    bc: BoundaryCondition,
    nu: u32,
    k: u32,
    angular: AngularPart,
) -> Result<DiskEigenpair> {
    let angular = match (nu, angular) {
        (0, AngularPart::Cos) => AngularFactor::Constant,
        (0, AngularPart::Sin) => {
            return Err(Error::InvalidMode("sin 0θ vanishes identically".into()))
        }
        (n, AngularPart::Cos) => AngularFactor::Cos(n),
        (n, AngularPart::Sin) => AngularFactor::Sin(n),
    };
    let kappa = zero_for(bc, nu, k)?;
    let angular_mass = AngularFactor::overlap(angular, angular);
    let radial_norm_const = if kappa == 0.0 {
        // Two sheets of area π each: 2π C² = 1.
        1.0 / angular_mass.sqrt()
    } else {
        let (j, dj) = bessel_j_pair(nu, kappa);
        match bc {
            // ∫₀¹ J_ν(κr)² r dr = J'_ν(κ)²/2 at a zero of J_ν.
            BoundaryCondition::Dirichlet => 1.0 / (angular_mass.sqrt() * dj),
            // ∫₀¹ J_ν(κr)² r dr = (1 - ν²/κ²) J_ν(κ)²/2 at a zero of J'_ν.
            BoundaryCondition::Neumann => {
                let nuf = f64::from(nu);
                1.0 / ((angular_mass * (1.0 - nuf * nuf / (kappa * kappa))).sqrt() * j)
            }
        }
    };
    Ok(DiskEigenpair {
        bc,
        nu,
        k,
        kappa,
        lambda: kappa * kappa,
        angular,
        radial_norm_const,
    })
}

/// Every member (`cos` and `sin` when `ν ≥ 1`) of the eigenspace `(bc, ν, k)`.
pub fn eigenpair_members(bc: BoundaryCondition, nu: u32, k: u32) -> Result<Vec<DiskEigenpair>> {
    let mut out = vec![eigenpair(bc, nu, k, AngularPart::Cos)?];
    if nu > 0 {
        out.push(eigenpair(bc, nu, k, AngularPart::Sin)?);
    }
    Ok(out)
}

/// Boundary data of a limit eigenfunction near the circle,
/// `ψ± = Ψ⁽⁰⁾ ± Ψ⁽¹⁾ τ + O(τ²)` with `τ = 1 - r` the inward normal
/// distance. Both traces carry the eigenfunction's angular factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Traces {
    pub psi0_amplitude: f64,
    pub psi1_amplitude: f64,
    pub angular: AngularFactor,
}

pub fn traces(pair: &DiskEigenpair) -> Traces {
    let (value, slope) = pair.radial(1.0);
    let (psi0, psi1) = match pair.bc {
        BoundaryCondition::Dirichlet => (0.0, -slope),
        BoundaryCondition::Neumann => (value, 0.0),
    };
    Traces {
        psi0_amplitude: psi0,
        psi1_amplitude: psi1,
        angular: pair.angular,
    }
}

/// `(ν, k)` radial value and derivative.
pub fn radial_eval(pair: &DiskEigenpair, r: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::DomainError(format!("radius {r} outside [0, 1]")));
    }
    Ok(pair.radial(r))
}

/// One row of the limit spectrum listing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEntry {
    pub lambda: f64,
    pub bc: BoundaryCondition,
    pub nu: u32,
    pub k: u32,
    pub multiplicity: u32,
}

fn entry_order(a: &LimitEntry, b: &LimitEntry) -> std::cmp::Ordering {
    a.lambda
        .total_cmp(&b.lambda)
        .then(a.bc.cmp(&b.bc))
        .then(a.nu.cmp(&b.nu))
        .then(a.k.cmp(&b.k))
}

/// All limit eigenvalues with `κ ≤ kappa_max`, ascending.
pub fn limit_entries_below(kappa_max: f64) -> Result<Vec<LimitEntry>> {
    if !(kappa_max >= 0.0) {
        return Ok(Vec::new());
    }
    // j_{ν,1} > ν and j'_{ν,1} > ν, so larger orders cannot contribute.
    let top = kappa_max.floor() as u32;
    if top > MAX_ORDER {
        return Err(Error::DomainError(format!(
            "limit spectrum up to κ = {kappa_max} needs Bessel orders above {MAX_ORDER}"
        )));
    }
    let mut out = vec![LimitEntry {
        lambda: 0.0,
        bc: BoundaryCondition::Neumann,
        nu: 0,
        k: 1,
        multiplicity: 1,
    }];
    for nu in 0..=top {
        let multiplicity = if nu == 0 { 1 } else { 2 };
        for z in bessel_zeros_below(nu, ZeroKind::J, kappa_max)? {
            out.push(LimitEntry {
                lambda: z.location * z.location,
                bc: BoundaryCondition::Dirichlet,
                nu,
                k: z.index,
                multiplicity,
            });
        }
        let shift = u32::from(nu == 0);
        for z in bessel_zeros_below(nu, ZeroKind::JPrime, kappa_max)? {
            out.push(LimitEntry {
                lambda: z.location * z.location,
                bc: BoundaryCondition::Neumann,
                nu,
                k: z.index + shift,
                multiplicity,
            });
        }
    }
    out.sort_by(entry_order);
    Ok(out)
}

/// The first `count` distinct limit eigenvalue entries (each with its
/// geometric multiplicity), ascending.
pub fn limit_eigenvalues(count: usize) -> Result<Vec<LimitEntry>> {
    if count == 0 || count > MAX_LIMIT_COUNT {
        return Err(Error::InvalidInput(format!(
            "count must lie in 1..={MAX_LIMIT_COUNT}, got {count}"
        )));
    }
    let mut kappa_max = 8.0;
    loop {
        let mut entries = limit_entries_below(kappa_max)?;
        if entries.len() >= count {
            entries.truncate(count);
            return Ok(entries);
        }
        kappa_max *= 1.5;
    }
}

/// An `m`-fold limit eigenvalue with an orthonormal basis of its
/// eigenspace.
///
/// The basis is stored as coefficients over the separated eigenpairs:
/// member `j` is `Σ_i basis[(i, j)] · pairs[i]`. A freshly collected group
/// has the identity basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenGroup {
    pub lambda: f64,
    pub pairs: Vec<DiskEigenpair>,
    pub traces: Vec<Traces>,
    pub basis: Matrix,
    /// Dirichlet and Neumann members share this eigenvalue.
    pub mixed: bool,
}

impl EigenGroup {
    pub fn from_pairs(pairs: Vec<DiskEigenpair>) -> Result<Self> {
        let first = pairs
            .first()
            .ok_or(Error::EmptyGroup { target: f64::NAN })?;
        let lambda = pairs.iter().map(|p| p.lambda).sum::<f64>() / pairs.len() as f64;
        let mixed = pairs.iter().any(|p| p.bc != first.bc);
        let traces = pairs.iter().map(traces).collect();
        let basis = Matrix::identity(pairs.len());
        Ok(Self {
            lambda,
            pairs,
            traces,
            basis,
            mixed,
        })
    }

    pub fn multiplicity(&self) -> usize {
        self.pairs.len()
    }

    pub fn contains_constant_mode(&self) -> bool {
        self.pairs.iter().any(DiskEigenpair::is_constant_mode)
    }

    /// Replace the basis by `basis · rotation`.
    pub fn rotated(&self, rotation: &Matrix) -> Self {
        Self {
            basis: self.basis.matmul(rotation),
            ..self.clone()
        }
    }

    /// Gram matrix of the members in the double-sided `L₂` product,
    /// using the analytic orthonormality of the separated pairs.
    pub fn member_gram(&self) -> Matrix {
        self.basis.transpose().matmul(&self.basis)
    }
}

/// Collect every eigenpair with `|λ - λ_target| ≤ tol (1 + |λ_target|)`.
pub fn group_degenerate(lambda_target: f64, tol: f64) -> Result<EigenGroup> {
    if !lambda_target.is_finite() || !(tol >= 0.0) {
        return Err(Error::InvalidInput("target must be finite and tol non-negative".into()));
    }
    let window = tol * (1.0 + lambda_target.abs());
    if lambda_target + window < 0.0 {
        return Err(Error::EmptyGroup {
            target: lambda_target,
        });
    }
    let kappa_max = (lambda_target + window).max(0.0).sqrt();
    let mut pairs = Vec::new();
    for e in limit_entries_below(kappa_max)? {
        if (e.lambda - lambda_target).abs() <= window {
            pairs.extend(eigenpair_members(e.bc, e.nu, e.k)?);
        }
    }
    if pairs.is_empty() {
        return Err(Error::EmptyGroup {
            target: lambda_target,
        });
    }
    EigenGroup::from_pairs(pairs)
}
