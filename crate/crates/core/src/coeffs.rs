//! Coefficient matrices of the three-term eigenvalue asymptotics
//!
//! `λ_k(ε) = λ + ε² ln ε · μ_k(1/ln ε) + O(ε^{2+ρ})`,
//!
//! where `μ_k` are the eigenvalues of `Λ⁽⁰⁾ + Λ⁽¹⁾ / ln ε`. `Λ⁽⁰⁾` is a
//! boundary integral of the traces; `Λ⁽¹⁾` is a `δ`-regularized bulk
//! integral over the disk with the collar `1 - δ < r < 1` removed, plus a
//! `ln δ` counterterm and a final boundary term.
//!
//! Angular integrals are done in closed form; only radial integrals are
//! numerical.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::limit_spectrum::{AngularFactor, BoundaryCondition, DiskEigenpair, EigenGroup};
use crate::numerics::{
    extrapolate_sqrt_delta, integrate_with, symmetric_eigen_dense, Matrix, QuadratureOptions,
    SqrtDeltaSeries,
};
use crate::specfun::bessel_j_orders;
use crate::{Error, Result};

/// One side of the surface, `h(r) = √q(r)` with `q` a polynomial in `r²`.
///
/// `q` is stored re-expanded in `τ = 1 - r` so that `q` and `|∇h|²` stay
/// accurate at the rim, where `q(1) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RadialProfileSpec", into = "RadialProfileSpec")]
pub struct RadialProfile {
    /// Coefficients of `q` in powers of `r²`.
    r2_coeffs: Vec<f64>,
    /// Coefficients of `q` in powers of `τ`; `tau_coeffs[0] = 0`.
    tau_coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RadialProfileSpec {
    q_coeffs: Vec<f64>,
}

impl TryFrom<RadialProfileSpec> for RadialProfile {
    type Error = Error;
    fn try_from(spec: RadialProfileSpec) -> Result<Self> {
        Self::from_q_coeffs(spec.q_coeffs)
    }
}

impl From<RadialProfile> for RadialProfileSpec {
    fn from(p: RadialProfile) -> Self {
        Self {
            q_coeffs: p.r2_coeffs,
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl RadialProfile {
    /// `h(r) = √(1 - r²)`.
    pub fn ellipsoid() -> Self {
        Self::from_q_coeffs(vec![1.0, -1.0]).expect("ellipsoid profile is valid")
    }

    /// `q(r) = Σ_i c_i r^{2i}` with `q(1) = 0`, `q'(1) < 0` and `q > 0` on
    /// `[0, 1)`.
    pub fn from_q_coeffs(r2_coeffs: Vec<f64>) -> Result<Self> {
        if r2_coeffs.len() < 2 || r2_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "profile polynomial needs at least two finite coefficients".into(),
            ));
        }
        let scale = r2_coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let at_rim: f64 = r2_coeffs.iter().sum();
        if at_rim.abs() > 1e-12 * scale {
            return Err(Error::InvalidInput(format!("profile must vanish at r = 1, q(1) = {at_rim}")));
        }
        // r^{2i} = (1 - τ)^{2i}.
        let degree = 2 * (r2_coeffs.len() - 1);
        let mut tau_coeffs = vec![0.0; degree + 1];
        for (i, &c) in r2_coeffs.iter().enumerate() {
            let n = 2 * i;
            for (k, slot) in tau_coeffs.iter_mut().enumerate().take(n + 1) {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                *slot += c * sign * binomial(n, k);
            }
        }
        tau_coeffs[0] = 0.0;
        let profile = Self {
            r2_coeffs,
            tau_coeffs,
        };
        if !(profile.tau_coeffs[1] > 0.0) {
            return Err(Error::InvalidInput(
                "profile needs q'(1) < 0 (simple zero at the rim)".into(),
            ));
        }
        if (1..=1000).any(|i| profile.q_tau(i as f64 / 1000.0) <= 0.0) {
            return Err(Error::InvalidInput("profile q must be positive on [0, 1)".into()));
        }
        Ok(profile)
    }

    pub fn q_coeffs(&self) -> &[f64] {
        &self.r2_coeffs
    }

    pub fn is_ellipsoid(&self) -> bool {
        self.r2_coeffs == [1.0, -1.0]
    }

    fn q_tau(&self, tau: f64) -> f64 {
        self.tau_coeffs.iter().rev().fold(0.0, |acc, c| acc * tau + c)
    }

    /// `dq/dτ`.
    fn dq_tau(&self, tau: f64) -> f64 {
        self.tau_coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * tau + k as f64 * c)
    }

    pub fn h(&self, r: f64) -> f64 {
        self.q_tau(1.0 - r).max(0.0).sqrt()
    }

    /// `dh/dr`.
    pub fn dh(&self, r: f64) -> f64 {
        let tau = 1.0 - r;
        -self.dq_tau(tau) / (2.0 * self.q_tau(tau).sqrt())
    }

    /// `|∇h|² = h'(r)²` as a function of the rim distance `τ`.
    pub fn grad_h_sq_tau(&self, tau: f64) -> f64 {
        let dq = self.dq_tau(tau);
        dq * dq / (4.0 * self.q_tau(tau))
    }

    pub fn grad_h_sq(&self, r: f64) -> f64 {
        self.grad_h_sq_tau(1.0 - r)
    }

    /// Near the rim `h² ≈ -q'(1) τ`, so `τ = a(t) ≈ t² / (-q'(1))` with
    /// `t = h`, giving `a₂ = ½ a''(0) = -1 / q'(1)`.
    pub fn a2(&self) -> f64 {
        1.0 / self.tau_coeffs[1]
    }
}

/// The two sheets `x₃ = ε h₊` and `x₃ = -ε h₋` of the surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatteningProfile {
    pub upper: RadialProfile,
    pub lower: RadialProfile,
}

impl FlatteningProfile {
    /// The oblate spheroid `h± = √(1 - r²)`, `a₂ = ½`.
    pub fn ellipsoid() -> Self {
        Self::symmetric(RadialProfile::ellipsoid())
    }

    pub fn symmetric(profile: RadialProfile) -> Self {
        Self {
            upper: profile.clone(),
            lower: profile,
        }
    }

    /// Both sheets must meet the rim with the same curvature so that `a₂`
    /// is well defined.
    pub fn new(upper: RadialProfile, lower: RadialProfile) -> Result<Self> {
        if (upper.a2() - lower.a2()).abs() > 1e-12 * upper.a2() {
            return Err(Error::InvalidInput(format!(
                "sheets have different rim data: a2 = {} vs {}",
                upper.a2(),
                lower.a2()
            )));
        }
        Ok(Self { upper, lower })
    }

    pub fn a2(&self) -> f64 {
        self.upper.a2()
    }

    pub fn is_symmetric(&self) -> bool {
        self.upper == self.lower
    }

    pub fn is_ellipsoid(&self) -> bool {
        self.is_symmetric() && self.upper.is_ellipsoid()
    }
}

/// `Λ⁽⁰⁾`, `Λ⁽¹⁾` for one degenerate group, in the group's current basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientMatrices {
    pub lambda0: Matrix,
    pub lambda1: Matrix,
    pub group: EigenGroup,
    pub a2: f64,
}

impl CoefficientMatrices {
    pub fn mu_at(&self, eps: f64) -> Result<Vec<f64>> {
        mu_eigenvalues(&self.lambda0, &self.lambda1, eps)
    }

    pub fn predict(&self, eps: f64) -> Result<Vec<f64>> {
        predict(self.group.lambda, &self.lambda0, &self.lambda1, eps)
    }

    pub fn prediction(&self) -> Prediction {
        Prediction {
            lambda_limit: self.group.lambda,
            lambda0: self.lambda0.clone(),
            lambda1: self.lambda1.clone(),
            remainder_exponent_bound: REMAINDER_EXPONENT_BOUND,
        }
    }
}

/// The remainder is `O(ε^{2+ρ})` for every `ρ` below this bound.
pub const REMAINDER_EXPONENT_BOUND: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub lambda_limit: f64,
    pub lambda0: Matrix,
    pub lambda1: Matrix,
    pub remainder_exponent_bound: f64,
}

impl Prediction {
    pub fn mu_at(&self, eps: f64) -> Result<Vec<f64>> {
        mu_eigenvalues(&self.lambda0, &self.lambda1, eps)
    }

    pub fn at(&self, eps: f64) -> Result<Vec<f64>> {
        predict(self.lambda_limit, &self.lambda0, &self.lambda1, eps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffOptions {
    /// Decreasing collar widths for the regularized limit.
    pub delta_schedule: Vec<f64>,
    pub quad_tol: f64,
    /// Largest accepted error estimate of the `δ → 0` extrapolation.
    pub extrapolation_tol: f64,
    /// Allow groups containing the Neumann constant mode.
    pub include_constant_mode: bool,
}

/// The regularized integrals are smooth in `δ` for polynomial profiles, so
/// the `√δ` column mostly absorbs `δ²` curvature; starting at `1e-2` keeps
/// that bias below `1e-4`.
pub const DEFAULT_DELTA_SCHEDULE: [f64; 5] = [1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4];

impl Default for CoeffOptions {
    fn default() -> Self {
        Self {
            delta_schedule: DEFAULT_DELTA_SCHEDULE.to_vec(),
            quad_tol: 1e-12,
            extrapolation_tol: 1e-4,
            include_constant_mode: false,
        }
    }
}

/// `∫_{∂ω} (Ψ⁽¹⁾_a Ψ⁽¹⁾_b + λ Ψ⁽⁰⁾_a Ψ⁽⁰⁾_b - ∇Ψ⁽⁰⁾_a · ∇Ψ⁽⁰⁾_b) ds` on the
/// unit circle, over the separated pairs of the group.
fn boundary_form(group: &EigenGroup) -> Matrix {
    let lambda = group.lambda;
    let t = &group.traces;
    Matrix::from_fn(t.len(), |i, j| {
        let o = AngularFactor::overlap(t[i].angular, t[j].angular);
        let d = AngularFactor::derivative_overlap(t[i].angular, t[j].angular);
        let psi0 = t[i].psi0_amplitude * t[j].psi0_amplitude;
        let psi1 = t[i].psi1_amplitude * t[j].psi1_amplitude;
        (psi1 + lambda * psi0) * o - psi0 * d
    })
}

/// `Λ⁽⁰⁾_ij = ∫_{∂ω} a₂⁻¹ (λ Ψ⁽⁰⁾_i Ψ⁽⁰⁾_j - ∇Ψ⁽⁰⁾_i·∇Ψ⁽⁰⁾_j + Ψ⁽¹⁾_i Ψ⁽¹⁾_j) ds`.
pub fn lambda0(group: &EigenGroup, profile: &FlatteningProfile) -> Matrix {
    boundary_form(group)
        .scale(1.0 / profile.a2())
        .congruence(&group.basis)
}

/// Bulk part of the regularized integral for pairs `a`, `b` over `r < 1 - δ`,
/// both sheets.
fn bulk_integral(
    a: &DiskEigenpair,
    b: &DiskEigenpair,
    lambda: f64,
    profile: &FlatteningProfile,
    delta: f64,
    tol: f64,
) -> Result<f64> {
    let o = AngularFactor::overlap(a.angular, b.angular);
    let d = AngularFactor::derivative_overlap(a.angular, b.angular);
    if o == 0.0 && d == 0.0 {
        return Ok(0.0);
    }
    let lower_weight = a.bc.lower_side_sign() * b.bc.lower_side_sign();
    // ½|∇h|²(λψψ - ∇ψ·∇ψ) + (∇h·∇ψ)(∇h·∇ψ), integrated over θ:
    // |∇h|² · ½ (λ O R_a R_b + O R'_a R'_b - D R_a R_b / r²).
    // r = 1 - u², so the rim singularity becomes ~1/u.
    let integrand = |u: f64| {
        let tau = u * u;
        let r = 1.0 - tau;
        let (ra, dra) = a.radial(r);
        let (rb, drb) = b.radial(r);
        let angular = 0.5 * (lambda * o * ra * rb + o * dra * drb - d * ra * rb / (r * r));
        let g = profile.upper.grad_h_sq_tau(tau) + lower_weight * profile.lower.grad_h_sq_tau(tau);
        2.0 * u * r * g * angular
    };
    let opts = QuadratureOptions::default().with_abs_tol(tol);
    Ok(integrate_with(integrand, delta.sqrt(), 1.0, &opts)?.value)
}

/// Regularized samples `I_ab(δ) = bulk_ab(δ) + ln δ · B_ab / (4 a₂)` over the
/// separated pairs, one matrix per `δ`.
pub fn regularized_samples(
    group: &EigenGroup,
    profile: &FlatteningProfile,
    opts: &CoeffOptions,
) -> Result<Vec<(f64, Matrix)>> {
    let schedule = &opts.delta_schedule;
    if schedule.len() < 3 {
        return Err(Error::InvalidInput("delta schedule needs at least 3 values".into()));
    }
    if schedule.iter().any(|&d| !(d > 0.0 && d <= 0.2)) {
        return Err(Error::DomainError("delta values must lie in (0, 0.2]".into()));
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput("delta schedule must be strictly decreasing".into()));
    }
    let boundary = boundary_form(group);
    let a2 = profile.a2();
    let m = group.pairs.len();
    schedule
        .par_iter()
        .map(|&delta| {
            let mut mat = Matrix::zeros(m);
            for i in 0..m {
                for j in 0..=i {
                    let bulk = bulk_integral(
                        &group.pairs[i],
                        &group.pairs[j],
                        group.lambda,
                        profile,
                        delta,
                        opts.quad_tol,
                    )?;
                    let v = bulk + delta.ln() * boundary[(i, j)] / (4.0 * a2);
                    mat[(i, j)] = v;
                    mat[(j, i)] = v;
                }
            }
            Ok((delta, mat))
        })
        .collect()
}

/// `Λ⁽¹⁾` from the regularized bulk integrals, extrapolated to `δ → 0` in
/// the basis `{1, √δ, δ}`.
pub fn lambda1_general(
    group: &EigenGroup,
    profile: &FlatteningProfile,
    opts: &CoeffOptions,
) -> Result<Matrix> {
    let samples = regularized_samples(group, profile, opts)?;
    let m = group.pairs.len();
    let a2 = profile.a2();
    let boundary = boundary_form(group);
    let rim_weight = (1.0 + 4.0 * LN_2 + a2.ln()) / (4.0 * a2);
    let mut out = Matrix::zeros(m);
    for i in 0..m {
        for j in 0..=i {
            let series = SqrtDeltaSeries::new(samples.iter().map(|(d, s)| (*d, s[(i, j)])).collect())?;
            let fit = extrapolate_sqrt_delta(&series)?;
            let scale = 1.0 + fit.limit.abs();
            if fit.error_estimate > opts.extrapolation_tol * scale {
                return Err(Error::ExtrapolationUnstable {
                    estimate: fit.error_estimate,
                    tol: opts.extrapolation_tol * scale,
                });
            }
            let v = -fit.limit - rim_weight * boundary[(i, j)];
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out.congruence(&group.basis))
}

/// The reduced one-dimensional formula for `Λ⁽¹⁾₁₁` on the spheroid, valid
/// for the radial Dirichlet family (`ν = 0`) and the Neumann `ν = 1` family.
pub fn lambda1_radial_reduced(pair: &DiskEigenpair, profile: &FlatteningProfile) -> Result<f64> {
    if !profile.is_ellipsoid() {
        return Err(Error::UnsupportedFamily(
            "reduced formula is derived for the spheroid profile only".into(),
        ));
    }
    let kappa = pair.kappa;
    let lambda = pair.lambda;
    let opts = QuadratureOptions::default().with_abs_tol(1e-12);
    match (pair.bc, pair.nu) {
        (BoundaryCondition::Dirichlet, 0) => {
            let j1_rim = bessel_j_orders(1, kappa)[1];
            let integrand = |r: f64| {
                let j = bessel_j_orders(1, kappa * r);
                let one_minus_r2 = (1.0 - r) * (1.0 + r);
                r.powi(3) / one_minus_r2 * (j[0] * j[0] + j[1] * j[1] - j1_rim * j1_rim)
            };
            let integral = integrate_with(integrand, 0.0, 1.0, &opts)?.value;
            Ok(-lambda / (j1_rim * j1_rim) * integral - lambda * LN_2)
        }
        (BoundaryCondition::Neumann, 1) => {
            let rim = bessel_j_orders(1, kappa);
            let (j0_rim, j1_rim) = (rim[0], rim[1]);
            let integrand = |r: f64| {
                let x = kappa * r;
                let j = bessel_j_orders(1, x);
                let one_minus_r2 = (1.0 - r) * (1.0 + r);
                let bracket = j[1] * j[1] - j1_rim * j1_rim + j[0] * j[0] + j0_rim * j0_rim
                    - 2.0 / x * j[0] * j[1];
                r.powi(3) / one_minus_r2 * bracket
            };
            let integral = integrate_with(integrand, 0.0, 1.0, &opts)?.value;
            Ok(-lambda / (j0_rim * j0_rim * (kappa * kappa - 1.0)) * integral - lambda * LN_2)
        }
        (bc, nu) => Err(Error::UnsupportedFamily(format!(
            "no reduced formula for {bc} modes with angular order {nu}"
        ))),
    }
}

/// Both matrices for a group; rejects the Neumann constant mode unless
/// `opts.include_constant_mode` is set.
pub fn coefficient_matrices(
    group: &EigenGroup,
    profile: &FlatteningProfile,
    opts: &CoeffOptions,
) -> Result<CoefficientMatrices> {
    if group.contains_constant_mode() && !opts.include_constant_mode {
        return Err(Error::InvalidMode(
            "the constant mode is excluded from coefficient pipelines (set include_constant_mode)"
                .into(),
        ));
    }
    Ok(CoefficientMatrices {
        lambda0: lambda0(group, profile),
        lambda1: lambda1_general(group, profile, opts)?,
        group: group.clone(),
        a2: profile.a2(),
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("epsilon {eps} outside (0, 1)")))
    }
}

/// Ascending eigenvalues of `Λ⁽⁰⁾ + Λ⁽¹⁾ / ln ε`.
pub fn mu_eigenvalues(lambda0: &Matrix, lambda1: &Matrix, eps: f64) -> Result<Vec<f64>> {
    check_eps(eps)?;
    let pencil = lambda0.add(&lambda1.scale(1.0 / eps.ln()));
    Ok(symmetric_eigen_dense(&pencil)?.values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagonalized {
    pub group: EigenGroup,
    pub rotation: Matrix,
    pub lambda0: Matrix,
    pub lambda1: Matrix,
    /// Diagonal of the rotated pencil, ascending (`μ_k`).
    pub mu: Vec<f64>,
}

/// Rotate the group basis so that `Λ⁽⁰⁾ + Λ⁽¹⁾ / ln ε` becomes diagonal.
pub fn diagonalize_group(
    group: &EigenGroup,
    lambda0: &Matrix,
    lambda1: &Matrix,
    eps: f64,
) -> Result<Diagonalized> {
    check_eps(eps)?;
    let pencil = lambda0.add(&lambda1.scale(1.0 / eps.ln()));
    let eig = symmetric_eigen_dense(&pencil)?;
    Ok(Diagonalized {
        group: group.rotated(&eig.vectors),
        lambda0: lambda0.congruence(&eig.vectors),
        lambda1: lambda1.congruence(&eig.vectors),
        mu: eig.values,
        rotation: eig.vectors,
    })
}

/// `λ + ε² ln ε · μ_k(1/ln ε)`, ordered like `μ_k`.
///
/// At `ε = 1` the correction is dropped and `λ` is returned for every
/// member.
pub fn predict(lambda_limit: f64, lambda0: &Matrix, lambda1: &Matrix, eps: f64) -> Result<Vec<f64>> {
    if eps == 1.0 {
        return Ok(vec![lambda_limit; lambda0.dim()]);
    }
    let scale = eps * eps * eps.ln();
    Ok(mu_eigenvalues(lambda0, lambda1, eps)?
        .into_iter()
        .map(|mu| lambda_limit + scale * mu)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_spectrum::{eigenpair, group_degenerate, AngularPart, DEFAULT_GROUP_TOL};
    use approx::assert_relative_eq;

    const J01: f64 = 2.404_825_557_695_773;

    #[test]
    fn ellipsoid_profile_data() {
        let p = RadialProfile::ellipsoid();
        assert_eq!(p.a2(), 0.5);
        for r in [0.0, 0.3, 0.9, 0.999] {
            assert_relative_eq!(p.h(r), (1.0 - r * r).sqrt(), max_relative = 1e-12);
            assert_relative_eq!(p.grad_h_sq(r), r * r / (1.0 - r * r), max_relative = 1e-10);
            assert_relative_eq!(p.dh(r), -r / (1.0 - r * r).sqrt(), epsilon = 1e-10);
        }
        assert_eq!(p.h(1.0), 0.0);
        assert!(FlatteningProfile::ellipsoid().is_ellipsoid());
    }

    #[test]
    fn polynomial_profile_validation() {
        // q = (1 - r²)(2 - r²) has q'(1) = -2, so a₂ = 1/2.
        let p = RadialProfile::from_q_coeffs(vec![2.0, -3.0, 1.0]).unwrap();
        assert_relative_eq!(p.a2(), 0.5, max_relative = 1e-14);
        assert!(!p.is_ellipsoid());
        // q = 1 - r⁴: q'(1) = -4, a₂ = 1/4.
        let p = RadialProfile::from_q_coeffs(vec![1.0, 0.0, -1.0]).unwrap();
        assert_relative_eq!(p.a2(), 0.25, max_relative = 1e-14);

        assert!(RadialProfile::from_q_coeffs(vec![1.0, -0.5]).is_err());
        // Double zero at the rim.
        assert!(RadialProfile::from_q_coeffs(vec![1.0, -2.0, 1.0]).is_err());
        // Negative inside.
        assert!(RadialProfile::from_q_coeffs(vec![-1.0, 1.0]).is_err());

        let up = RadialProfile::ellipsoid();
        let down = RadialProfile::from_q_coeffs(vec![1.0, 0.0, -1.0]).unwrap();
        assert!(FlatteningProfile::new(up.clone(), down).is_err());
        let down = RadialProfile::from_q_coeffs(vec![2.0, -3.0, 1.0]).unwrap();
        let asym = FlatteningProfile::new(up, down).unwrap();
        assert!(!asym.is_symmetric());
    }

    #[test]
    fn lambda0_closed_forms() {
        let profile = FlatteningProfile::ellipsoid();
        let g = group_degenerate(J01 * J01, DEFAULT_GROUP_TOL).unwrap();
        let l0 = lambda0(&g, &profile);
        assert_relative_eq!(l0[(0, 0)], 2.0 * g.lambda, max_relative = 1e-12);

        let c = group_degenerate(0.0, DEFAULT_GROUP_TOL).unwrap();
        assert_eq!(lambda0(&c, &profile)[(0, 0)], 0.0);
    }

    #[test]
    fn reduced_formula_rejects_other_families() {
        let profile = FlatteningProfile::ellipsoid();
        let p = eigenpair(BoundaryCondition::Dirichlet, 1, 1, AngularPart::Cos).unwrap();
        assert!(matches!(
            lambda1_radial_reduced(&p, &profile),
            Err(Error::UnsupportedFamily(_))
        ));
        let other = FlatteningProfile::symmetric(RadialProfile::from_q_coeffs(vec![2.0, -3.0, 1.0]).unwrap());
        let p = eigenpair(BoundaryCondition::Dirichlet, 0, 1, AngularPart::Cos).unwrap();
        assert!(lambda1_radial_reduced(&p, &other).is_err());
    }

    #[test]
    fn mu_and_predict_scalar_case() {
        let l0 = Matrix::from_diagonal(&[11.0]);
        let l1 = Matrix::from_diagonal(&[-6.0]);
        let mu = mu_eigenvalues(&l0, &l1, 0.1).unwrap();
        assert_relative_eq!(mu[0], 11.0 - 6.0 / 0.1f64.ln(), max_relative = 1e-14);
        let p = predict(5.0, &l0, &l1, 0.1).unwrap();
        assert_relative_eq!(p[0], 5.0 + 0.01 * 0.1f64.ln() * mu[0], max_relative = 1e-14);
        assert_eq!(predict(5.0, &l0, &l1, 1.0).unwrap(), vec![5.0]);
        assert!(mu_eigenvalues(&l0, &l1, 1.0).is_err());
        assert!(predict(5.0, &l0, &l1, 0.0).is_err());
        // Λ⁽¹⁾ = 0: μ are the eigenvalues of Λ⁽⁰⁾ for every ε.
        let zero = Matrix::zeros(1);
        for eps in [0.5, 0.1, 1e-6] {
            assert_eq!(mu_eigenvalues(&l0, &zero, eps).unwrap(), vec![11.0]);
        }
    }

    #[test]
    fn constant_mode_excluded_by_default() {
        let profile = FlatteningProfile::ellipsoid();
        let g = group_degenerate(0.0, DEFAULT_GROUP_TOL).unwrap();
        assert!(matches!(
            coefficient_matrices(&g, &profile, &CoeffOptions::default()),
            Err(Error::InvalidMode(_))
        ));
        let opts = CoeffOptions {
            include_constant_mode: true,
            ..CoeffOptions::default()
        };
        let m = coefficient_matrices(&g, &profile, &opts).unwrap();
        assert_eq!(m.lambda0[(0, 0)], 0.0);
    }

    #[test]
    fn schedule_validation() {
        let profile = FlatteningProfile::ellipsoid();
        let g = group_degenerate(J01 * J01, DEFAULT_GROUP_TOL).unwrap();
        for schedule in [vec![0.01, 0.005], vec![0.3, 0.2, 0.1], vec![0.01, 0.02, 0.005]] {
            let opts = CoeffOptions {
                delta_schedule: schedule,
                ..CoeffOptions::default()
            };
            assert!(lambda1_general(&g, &profile, &opts).is_err());
        }
    }
}
