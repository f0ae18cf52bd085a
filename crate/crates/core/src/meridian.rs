//! Direct eigensolver for the Laplace–Beltrami operator on the spheroid
//! with meridian `(sin t, ε cos t)`, `t ∈ [0, π]`.
//!
//! Separating `e^{imφ}` leaves, per mode, the Sturm–Liouville problem
//! `-(1/ρ)(ρ f')' + (m²/ρ²) f = λ f` in arclength `s`, `ρ(s)` the distance to
//! the axis. It is discretized in flux form on a staggered uniform grid:
//! nodes at `(j + ½)h`, faces at `jh`, so no node sits on a pole and the
//! end faces carry `ρ = 0` (no flux).

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::limit_spectrum::{BoundaryCondition, LimitEntry};
use crate::numerics::{integrate_with, tridiag_eigen_smallest, QuadratureOptions, TridiagonalSystem};
use crate::specfun::elliptic_e;
use crate::{Error, Result};

pub const MIN_NODES: usize = 64;
/// Nodes per unit of `1/ε`: the rim region must be resolved.
pub const DEFAULT_GRID_C: f64 = 20.0;
pub const MAX_MODE: u32 = 20;
pub const MAX_PER_MODE: usize = 50;

/// `max(64, ⌈c / ε⌉)`.
pub fn required_nodes(eps: f64, c: f64) -> usize {
    MIN_NODES.max((c / eps).ceil() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridRule {
    /// Exactly this many nodes.
    Fixed(usize),
    /// `N = max(64, ⌈c / ε⌉)`.
    Resolution(f64),
}

impl GridRule {
    pub fn nodes(self, eps: f64) -> usize {
        match self {
            Self::Fixed(n) => n,
            Self::Resolution(c) => required_nodes(eps, c),
        }
    }
}

impl Default for GridRule {
    fn default() -> Self {
        Self::Resolution(DEFAULT_GRID_C)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeridianGrid {
    pub eps: f64,
    pub m: u32,
    pub n: usize,
    pub spacing: f64,
    pub total_arclength: f64,
    /// Arclength of the nodes, `(j + ½) h`.
    pub nodes: Vec<f64>,
    /// `ρ` at the nodes.
    pub rho: Vec<f64>,
    /// `ρ` at the `n + 1` faces `jh`; zero at both poles.
    pub rho_faces: Vec<f64>,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("epsilon {eps} outside (0, 1]")))
    }
}

/// `ds/dt` along the meridian.
fn speed(eps: f64, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    (c * c + eps * eps * s * s).sqrt()
}

/// `t` values for the arclength targets `targets` (ascending, within the
/// upper half `[0, L/2]`), by marching Newton on `∫_{t_prev}^{t} ds/dt = Δs`.
fn invert_arclength(eps: f64, targets: &[f64]) -> Result<Vec<f64>> {
    let opts = QuadratureOptions::default().with_abs_tol(1e-15).with_rel_tol(1e-14);
    let mut out = Vec::with_capacity(targets.len());
    let (mut t_prev, mut s_prev) = (0.0_f64, 0.0_f64);
    for &target in targets {
        let ds = target - s_prev;
        let (mut lo, mut hi) = (t_prev, FRAC_PI_2);
        let mut t = (t_prev + ds / speed(eps, t_prev)).min(FRAC_PI_2);
        for _ in 0..60 {
            let arc = if t > t_prev {
                integrate_with(|x| speed(eps, x), t_prev, t, &opts)?.value
            } else {
                0.0
            };
            let f = arc - ds;
            if f.abs() <= 2.0 * f64::EPSILON * target {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - f / speed(eps, t);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let converged = (next - t).abs() <= 4.0 * f64::EPSILON * next.max(1e-300);
            t = next;
            if converged {
                break;
            }
        }
        out.push(t);
        t_prev = t;
        s_prev = target;
    }
    Ok(out)
}

/// Node and face geometry, independent of the azimuthal mode.
#[derive(Debug, Clone, PartialEq)]
struct Geometry {
    eps: f64,
    n: usize,
    spacing: f64,
    total_arclength: f64,
    rho: Vec<f64>,
    rho_faces: Vec<f64>,
}

impl Geometry {
    fn new(eps: f64, n: usize, c: f64) -> Result<Self> {
        check_eps(eps)?;
        let required = required_nodes(eps, c);
        if n < required {
            return Err(Error::GridTooCoarse { n, required });
        }
        let total_arclength = 2.0 * elliptic_e(1.0 - eps * eps)?;
        let spacing = total_arclength / n as f64;
        // Half-step points i h/2, i = 0..=2n. Solve on the upper half and
        // mirror: ρ(L - s) = ρ(s).
        let half = n; // point n sits on the equator
        let targets: Vec<f64> = (1..half).map(|i| i as f64 * 0.5 * spacing).collect();
        let ts = invert_arclength(eps, &targets)?;
        let mut rho_half = Vec::with_capacity(2 * n + 1);
        rho_half.push(0.0);
        rho_half.extend(ts.iter().map(|t| t.sin()));
        rho_half.push(1.0);
        for i in half + 1..=2 * n {
            rho_half.push(rho_half[2 * n - i]);
        }
        let rho = (0..n).map(|j| rho_half[2 * j + 1]).collect();
        let rho_faces = (0..=n).map(|j| rho_half[2 * j]).collect();
        Ok(Self {
            eps,
            n,
            spacing,
            total_arclength,
            rho,
            rho_faces,
        })
    }

    fn grid(&self, m: u32) -> MeridianGrid {
        MeridianGrid {
            eps: self.eps,
            m,
            n: self.n,
            spacing: self.spacing,
            total_arclength: self.total_arclength,
            nodes: (0..self.n).map(|j| (j as f64 + 0.5) * self.spacing).collect(),
            rho: self.rho.clone(),
            rho_faces: self.rho_faces.clone(),
        }
    }
}

/// Grid with the default resolution constant.
pub fn build_grid(eps: f64, m: u32, n: usize) -> Result<MeridianGrid> {
    build_grid_with(eps, m, n, DEFAULT_GRID_C)
}

/// `GridTooCoarse` unless `n ≥ max(64, ⌈c / ε⌉)`.
pub fn build_grid_with(eps: f64, m: u32, n: usize, c: f64) -> Result<MeridianGrid> {
    Ok(Geometry::new(eps, n, c)?.grid(m))
}

/// Stiffness `K` and lumped mass `M = diag(ρ_j h)`:
/// `K_jj = (ρ_{j-½} + ρ_{j+½})/h + m² h/ρ_j`, `K_{j,j+1} = -ρ_{j+½}/h`.
pub fn assemble(grid: &MeridianGrid) -> Result<TridiagonalSystem> {
    let h = grid.spacing;
    let m2 = f64::from(grid.m).powi(2);
    let f = &grid.rho_faces;
    let diagonal = (0..grid.n)
        .map(|j| (f[j] + f[j + 1]) / h + m2 * h / grid.rho[j])
        .collect();
    let off = (1..grid.n).map(|j| -f[j] / h).collect();
    let mass = grid.rho.iter().map(|r| r * h).collect();
    TridiagonalSystem::with_mass(diagonal, off, mass)
}

/// Symmetry of an eigenvector under reflection through the equator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Undetermined,
}

impl Parity {
    /// Even modes converge to Neumann, odd ones to Dirichlet modes.
    pub fn limit_condition(self) -> Option<BoundaryCondition> {
        match self {
            Self::Even => Some(BoundaryCondition::Neumann),
            Self::Odd => Some(BoundaryCondition::Dirichlet),
            Self::Undetermined => None,
        }
    }

    fn of(v: &[f64]) -> Self {
        let n = v.len();
        let norm: f64 = v.iter().map(|x| x * x).sum();
        let overlap: f64 = (0..n).map(|j| v[j] * v[n - 1 - j]).sum::<f64>() / norm;
        if overlap > 0.5 {
            Self::Even
        } else if overlap < -0.5 {
            Self::Odd
        } else {
            Self::Undetermined
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectEigenvalue {
    pub lambda: f64,
    pub m: u32,
    /// 0-based position within its mode.
    pub index: usize,
    /// 2 for `m ≥ 1` (`cos mφ` and `sin mφ`).
    pub multiplicity: u32,
    pub parity: Parity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeridianSpectrum {
    pub eps: f64,
    pub nodes: usize,
    pub total_arclength: f64,
    /// Ascending by `(λ, m)`.
    pub entries: Vec<DirectEigenvalue>,
}

impl MeridianSpectrum {
    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat(e.lambda).take(e.multiplicity as usize))
            .collect()
    }

    /// Eigenvalues of one azimuthal mode, ascending.
    pub fn mode(&self, m: u32) -> Vec<DirectEigenvalue> {
        let mut out: Vec<_> = self.entries.iter().filter(|e| e.m == m).copied().collect();
        out.sort_by_key(|e| e.index);
        out
    }

    /// The first `count` entries.
    pub fn truncated(&self, count: usize) -> Self {
        Self {
            entries: self.entries.iter().take(count).copied().collect(),
            ..self.clone()
        }
    }
}

/// One mode's smallest `k` eigenvalues with their parity.
pub fn mode_eigenvalues(grid: &MeridianGrid, k: usize) -> Result<Vec<DirectEigenvalue>> {
    let sys = assemble(grid)?;
    let pairs = tridiag_eigen_smallest(&sys, k, true)?;
    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(index, p)| DirectEigenvalue {
            lambda: p.value,
            m: grid.m,
            index,
            multiplicity: if grid.m == 0 { 1 } else { 2 },
            parity: p.vector.as_deref().map_or(Parity::Undetermined, Parity::of),
        })
        .collect())
}

/// Modes `0..=m_max`, `k_per_mode` eigenvalues each, merged.
pub fn spectrum(eps: f64, m_max: u32, k_per_mode: usize, rule: GridRule) -> Result<MeridianSpectrum> {
    if m_max > MAX_MODE {
        return Err(Error::InvalidInput(format!("m_max {m_max} above {MAX_MODE}")));
    }
    if k_per_mode == 0 || k_per_mode > MAX_PER_MODE {
        return Err(Error::InvalidInput(format!(
            "k_per_mode must lie in 1..={MAX_PER_MODE}, got {k_per_mode}"
        )));
    }
    let c = match rule {
        GridRule::Resolution(c) => c,
        GridRule::Fixed(_) => DEFAULT_GRID_C,
    };
    let geometry = Geometry::new(eps, rule.nodes(eps), c)?;
    let per_mode: Vec<Vec<DirectEigenvalue>> = (0..=m_max)
        .into_par_iter()
        .map(|m| mode_eigenvalues(&geometry.grid(m), k_per_mode))
        .collect::<Result<_>>()?;
    let mut entries: Vec<DirectEigenvalue> = per_mode.into_iter().flatten().collect();
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.m.cmp(&b.m)));
    Ok(MeridianSpectrum {
        eps,
        nodes: geometry.n,
        total_arclength: geometry.total_arclength,
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub direct: DirectEigenvalue,
    pub limit: LimitEntry,
    pub deviation: f64,
}

/// Pair each direct eigenvalue of mode `m` with the limit entry of angular
/// order `ν = m` at the same position, checking parity against the boundary
/// condition and requiring the deviation to stay below half the gap to the
/// neighbouring limit values of that order.
pub fn classify_limit(spec: &MeridianSpectrum, limits: &[LimitEntry]) -> Result<Vec<Pairing>> {
    if spec.entries.is_empty() {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    let mut out = Vec::with_capacity(spec.entries.len());
    for direct in &spec.entries {
        let mut same_order: Vec<LimitEntry> = limits.iter().filter(|l| l.nu == direct.m).copied().collect();
        same_order.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap_or(Ordering::Equal));
        let Some(&limit) = same_order.get(direct.index) else {
            return Err(Error::AmbiguousPairing(format!(
                "no limit entry left for mode m = {} position {}",
                direct.m, direct.index
            )));
        };
        if direct.parity.limit_condition() != Some(limit.bc) {
            return Err(Error::AmbiguousPairing(format!(
                "eigenvalue {} (m = {}) has parity {:?} but the limit entry {} is {}",
                direct.lambda, direct.m, direct.parity, limit.lambda, limit.bc
            )));
        }
        let deviation = direct.lambda - limit.lambda;
        let neighbours = [
            direct.index.checked_sub(1).and_then(|i| same_order.get(i)),
            same_order.get(direct.index + 1),
        ];
        let half_gap = neighbours
            .iter()
            .flatten()
            .map(|l| 0.5 * (l.lambda - limit.lambda).abs())
            .fold(f64::INFINITY, f64::min);
        if deviation.abs() >= half_gap {
            return Err(Error::AmbiguousPairing(format!(
                "eigenvalue {} (m = {}) is {} from its limit {}, not within half the gap {}",
                direct.lambda,
                direct.m,
                deviation.abs(),
                limit.lambda,
                half_gap
            )));
        }
        out.push(Pairing {
            direct: *direct,
            limit,
            deviation,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_spectrum::limit_eigenvalues;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn sphere_grid() {
        let g = build_grid(1.0, 0, 200).unwrap();
        assert_relative_eq!(g.total_arclength, PI, max_relative = 1e-15);
        assert_eq!(g.rho_faces[0], 0.0);
        assert_eq!(g.rho_faces[200], 0.0);
        for (s, r) in g.nodes.iter().zip(&g.rho) {
            assert_relative_eq!(*r, s.sin(), epsilon = 1e-13);
        }
        assert_relative_eq!(g.spacing * g.n as f64, g.total_arclength, max_relative = 1e-15);
    }

    #[test]
    fn flattened_grid() {
        let g = build_grid(0.1, 3, 400).unwrap();
        assert_relative_eq!(g.total_arclength, 2.0 * elliptic_e(0.99).unwrap(), max_relative = 1e-15);
        assert!(g.rho.iter().all(|&r| r > 0.0 && r <= 1.0));
        // Mirror symmetry and arclength consistency: |Δρ| ≤ Δs.
        for j in 0..g.n {
            assert_eq!(g.rho[j], g.rho[g.n - 1 - j]);
        }
        for w in g.rho_faces.windows(2) {
            assert!((w[1] - w[0]).abs() <= 0.5 * g.spacing * 2.0 + 1e-15);
        }
    }

    #[test]
    fn resolution_rule() {
        assert!(matches!(build_grid(0.1, 0, 100), Err(Error::GridTooCoarse { required: 200, .. })));
        assert!(matches!(build_grid(1.0, 0, 63), Err(Error::GridTooCoarse { required: 64, .. })));
        assert!(build_grid(0.0, 0, 1000).is_err());
        assert_eq!(GridRule::Resolution(20.0).nodes(0.01), 2000);
        assert_eq!(GridRule::Fixed(77).nodes(0.01), 77);
    }

    #[test]
    fn sphere_spectrum() {
        let s = spectrum(1.0, 2, 3, GridRule::Fixed(2000)).unwrap();
        let expanded = s.expanded();
        let expected = [0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0];
        for (a, b) in expanded.iter().zip(expected) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
        assert!(s.entries[0].lambda.abs() < 1e-8);
        // l = 1, m = 0 is z: odd under reflection.
        let m0 = s.mode(0);
        assert_eq!(m0[0].parity, Parity::Even);
        assert_eq!(m0[1].parity, Parity::Odd);
        assert_eq!(m0[2].parity, Parity::Even);
    }

    #[test]
    fn second_order_convergence() {
        let value = |n| mode_eigenvalues(&build_grid(1.0, 0, n).unwrap(), 2).unwrap()[1].lambda;
        let (a, b, c) = (value(200), value(400), value(800));
        let ratio = (a - b) / (b - c);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        assert!((c - 2.0).abs() < 1e-4);
    }

    #[test]
    fn classify_near_limit() {
        let s = spectrum(0.05, 2, 3, GridRule::Resolution(400.0)).unwrap();
        let limits = limit_eigenvalues(40).unwrap();
        let pairs = classify_limit(&s.truncated(5), &limits).unwrap();
        let bcs: Vec<_> = pairs.iter().map(|p| (p.limit.bc, p.limit.nu, p.direct.multiplicity)).collect();
        assert_eq!(
            bcs,
            vec![
                (BoundaryCondition::Neumann, 0, 1),
                (BoundaryCondition::Neumann, 1, 2),
                (BoundaryCondition::Dirichlet, 0, 1),
                (BoundaryCondition::Neumann, 2, 2),
                (BoundaryCondition::Dirichlet, 1, 2),
            ]
        );
        for p in &pairs {
            assert!(p.deviation.abs() < 0.015 * (1.0 + p.limit.lambda), "{p:?}");
        }
    }

    #[test]
    fn classify_far_from_limit() {
        let s = spectrum(1.0, 1, 3, GridRule::Fixed(400)).unwrap();
        let limits = limit_eigenvalues(40).unwrap();
        assert!(matches!(classify_limit(&s, &limits), Err(Error::AmbiguousPairing(_))));
        let empty = MeridianSpectrum {
            entries: Vec::new(),
            ..s
        };
        assert!(classify_limit(&empty, &limits).is_err());
    }

    #[test]
    fn monotone_approach_to_limit() {
        let target = crate::specfun::bessel_zero(0, 1, crate::specfun::ZeroKind::J).unwrap().location.powi(2);
        let mut prev = f64::INFINITY;
        for eps in [0.2, 0.1, 0.05] {
            let m0 = mode_eigenvalues(&build_grid(eps, 0, required_nodes(eps, 400.0)).unwrap(), 2).unwrap();
            let d = (m0[1].lambda - target).abs();
            assert!(d < prev);
            prev = d;
        }
    }
}
