//! End-to-end checks: direct eigenvalues of the flattened spheroid against
//! the coefficient predictions, the ellipse closed form, and grid
//! convergence of the meridian solver.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{coefficient_matrices, diagonalize_group, CoeffOptions, CoefficientMatrices, FlatteningProfile};
use crate::ellipse::{verify_expansion, ExpansionRow};
use crate::limit_spectrum::{eigenpair, group_degenerate, limit_entries_below, AngularPart, BoundaryCondition, DEFAULT_GROUP_TOL};
use crate::meridian::{build_grid_with, classify_limit, mode_eigenvalues, GridRule, MeridianSpectrum, DEFAULT_GRID_C};
use crate::numerics::fit_two_term;
use crate::{Error, Result};

pub const DEFAULT_EPS_SCHEDULE: [f64; 4] = [0.04, 0.02, 0.01, 0.005];
/// `N = 500/ε` keeps the discretization error near `1e-8` while staying at
/// `10⁵` nodes for `ε = 0.005`.
pub const DEFAULT_VALIDATION_GRID: GridRule = GridRule::Resolution(500.0);

/// A limit eigenvalue `(bc, ν, k)`, written `dirichlet:0:1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LimitSelector {
    pub bc: BoundaryCondition,
    pub nu: u32,
    pub k: u32,
}

impl fmt::Display for LimitSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.bc, self.nu, self.k)
    }
}

impl FromStr for LimitSelector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [bc, nu, k] = parts[..] else {
            return Err(Error::InvalidInput(format!("selector '{s}' is not bc:nu:k")));
        };
        let parse = |v: &str, what: &str| {
            v.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidInput(format!("selector '{s}': bad {what} '{v}'")))
        };
        Ok(Self {
            bc: bc.parse()?,
            nu: parse(nu, "order")?,
            k: parse(k, "index")?,
        })
    }
}

/// Pass thresholds; policy of this harness, kept in every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub c1_relative: f64,
    pub c2_relative: f64,
    /// Minimal factor by which `|λ_direct - predict| / ε²` must shrink per
    /// halving of `ε`.
    pub remainder_decay: f64,
    /// Maximal ratio of successive ellipse `residual / ε²` values.
    pub ellipse_ratio: f64,
    pub order_min: f64,
    pub order_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            c1_relative: 0.03,
            c2_relative: 0.15,
            remainder_decay: 1.5,
            ellipse_ratio: 0.5,
            order_min: 1.8,
            order_max: 2.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub selector: LimitSelector,
    pub lambda_limit: f64,
    /// Multiplicity of the direct eigenvalue (2 for `ν ≥ 1`).
    pub multiplicity: u32,
    pub eps_schedule: Vec<f64>,
    pub grid: GridRule,
    pub nodes: Vec<usize>,
    pub direct: Vec<f64>,
    pub predicted: Vec<f64>,
    /// Fitted `ε² ln ε` and `ε²` coefficients, `λ` held fixed.
    pub c1_fit: f64,
    pub c2_fit: f64,
    /// The matching diagonal entries of `Λ⁽⁰⁾` and `Λ⁽¹⁾`.
    pub c1_predicted: f64,
    pub c2_predicted: f64,
    pub c1_relative_error: f64,
    pub c2_relative_error: f64,
    pub rms_residual: f64,
    /// `c1_fit / λ`.
    pub c1_over_lambda: f64,
    /// `|λ_direct - predict| / ε²` along the schedule.
    pub scaled_remainder: Vec<f64>,
    /// Ratios of successive `scaled_remainder` values (larger ε over smaller).
    pub remainder_decay: Vec<f64>,
    pub c1_pass: bool,
    pub c2_pass: bool,
    pub remainder_pass: bool,
}

fn relative_error(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}

/// Index of the rotated member carrying most of the separated pair
/// `selector`.
fn member_for(m: &CoefficientMatrices, rotation: &crate::numerics::Matrix, selector: LimitSelector) -> Result<usize> {
    let row = m
        .group
        .pairs
        .iter()
        .position(|p| p.bc == selector.bc && p.nu == selector.nu && p.k == selector.k)
        .ok_or_else(|| Error::InvalidMode(format!("{selector} is not in the group")))?;
    let basis = m.group.basis.matmul(rotation);
    Ok((0..basis.dim())
        .max_by(|&a, &b| basis[(row, a)].abs().total_cmp(&basis[(row, b)].abs()))
        .unwrap_or(0))
}

/// Fit direct data `(ε, λ_direct)` against the coefficient matrices.
pub fn fit_against_prediction(
    selector: LimitSelector,
    matrices: &CoefficientMatrices,
    points: &[(f64, f64)],
    thresholds: &Thresholds,
) -> Result<ExpansionFit> {
    let lambda = matrices.group.lambda;
    let fit = fit_two_term(points, lambda)?;
    let eps_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let d = diagonalize_group(&matrices.group, &matrices.lambda0, &matrices.lambda1, eps_min)?;
    let member = member_for(matrices, &d.rotation, selector)?;
    let c1_predicted = d.lambda0[(member, member)];
    let c2_predicted = d.lambda1[(member, member)];

    let mut predicted = Vec::with_capacity(points.len());
    for &(eps, _) in points {
        let d = diagonalize_group(&matrices.group, &matrices.lambda0, &matrices.lambda1, eps)?;
        let member = member_for(matrices, &d.rotation, selector)?;
        predicted.push(lambda + eps * eps * eps.ln() * d.mu[member]);
    }
    let scaled_remainder: Vec<f64> = points
        .iter()
        .zip(&predicted)
        .map(|(&(eps, direct), p)| (direct - p).abs() / (eps * eps))
        .collect();
    let remainder_decay: Vec<f64> = scaled_remainder.windows(2).map(|w| w[0] / w[1]).collect();
    let c1_relative_error = relative_error(fit.c1, c1_predicted);
    let c2_relative_error = relative_error(fit.c2, c2_predicted);
    Ok(ExpansionFit {
        selector,
        lambda_limit: lambda,
        multiplicity: if selector.nu == 0 { 1 } else { 2 },
        eps_schedule: points.iter().map(|p| p.0).collect(),
        grid: GridRule::Fixed(0),
        nodes: Vec::new(),
        direct: points.iter().map(|p| p.1).collect(),
        predicted,
        c1_fit: fit.c1,
        c2_fit: fit.c2,
        c1_predicted,
        c2_predicted,
        c1_relative_error,
        c2_relative_error,
        rms_residual: fit.rms_residual,
        c1_over_lambda: fit.c1 / lambda,
        remainder_pass: remainder_decay.iter().all(|&r| r >= thresholds.remainder_decay),
        scaled_remainder,
        remainder_decay,
        c1_pass: c1_relative_error <= thresholds.c1_relative,
        c2_pass: c2_relative_error <= thresholds.c2_relative,
    })
}

/// Direct eigenvalue paired with `selector` at one `ε`, and the node count.
pub fn direct_eigenvalue(selector: LimitSelector, eps: f64, rule: GridRule) -> Result<(f64, usize)> {
    let target = eigenpair(selector.bc, selector.nu, selector.k, AngularPart::Cos)?;
    // Limit entries of the same order, with one neighbour above.
    let limits = limit_entries_below(target.kappa * 1.3 + 2.0)?;
    let position = limits
        .iter()
        .filter(|l| l.nu == selector.nu && l.lambda < target.lambda)
        .count();
    let c = match rule {
        GridRule::Resolution(c) => c,
        GridRule::Fixed(_) => DEFAULT_GRID_C,
    };
    let grid = build_grid_with(eps, selector.nu, rule.nodes(eps), c)?;
    let entries = mode_eigenvalues(&grid, position + 1)?;
    let spec = MeridianSpectrum {
        eps,
        nodes: grid.n,
        total_arclength: grid.total_arclength,
        entries,
    };
    let pairs = classify_limit(&spec, &limits)?;
    let hit = pairs[position];
    if (hit.limit.bc, hit.limit.nu, hit.limit.k) != (selector.bc, selector.nu, selector.k) {
        return Err(Error::AmbiguousPairing(format!(
            "eigenvalue {} at ε = {eps} pairs with {}:{}:{}, not {selector}",
            hit.direct.lambda, hit.limit.bc, hit.limit.nu, hit.limit.k
        )));
    }
    Ok((hit.direct.lambda, grid.n))
}

/// Direct eigenvalues over `eps_schedule`, paired with the limit and fitted
/// with `λ` fixed; predictions from the coefficient matrices.
pub fn validate_eigenvalue(
    selector: LimitSelector,
    eps_schedule: &[f64],
    rule: GridRule,
    opts: &CoeffOptions,
    thresholds: &Thresholds,
) -> Result<ExpansionFit> {
    if eps_schedule.len() < 3 {
        return Err(Error::InvalidInput("validation needs at least 3 epsilon values".into()));
    }
    if let Some(eps) = eps_schedule.iter().find(|&&e| !(e > 0.0 && e <= 0.2)) {
        return Err(Error::DomainError(format!("epsilon {eps} outside (0, 0.2]")));
    }
    let pair = eigenpair(selector.bc, selector.nu, selector.k, AngularPart::Cos)?;
    let group = group_degenerate(pair.lambda, DEFAULT_GROUP_TOL)?;
    let matrices = coefficient_matrices(&group, &FlatteningProfile::ellipsoid(), opts)?;
    let direct: Vec<(f64, usize)> = eps_schedule
        .par_iter()
        .map(|&eps| direct_eigenvalue(selector, eps, rule))
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = eps_schedule.iter().zip(&direct).map(|(&e, d)| (e, d.0)).collect();
    let mut fit = fit_against_prediction(selector, &matrices, &points, thresholds)?;
    fit.grid = rule;
    fit.nodes = direct.iter().map(|d| d.1).collect();
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipseCheck {
    pub k: u32,
    pub rows: Vec<ExpansionRow>,
    /// Successive `residual / ε²` ratios (smaller ε over larger).
    pub ratios: Vec<f64>,
    pub pass: bool,
}

/// `verify_expansion` for every `k`; passes when `residual / ε²` shrinks
/// by at least `thresholds.ellipse_ratio` at each step of `eps_list`.
pub fn run_ellipse_suite(k_list: &[u32], eps_list: &[f64], thresholds: &Thresholds) -> Result<Vec<EllipseCheck>> {
    if k_list.is_empty() || eps_list.is_empty() {
        return Err(Error::InvalidInput("ellipse suite needs nonempty k and epsilon lists".into()));
    }
    k_list
        .iter()
        .map(|&k| {
            let rows = verify_expansion(k, eps_list)?;
            let ratios: Vec<f64> = rows.windows(2).map(|w| w[1].scaled_residual / w[0].scaled_residual).collect();
            let pass = ratios.iter().all(|&r| r <= thresholds.ellipse_ratio);
            Ok(EllipseCheck { k, rows, ratios, pass })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub eps: f64,
    pub m: u32,
    /// 0-based position within the mode.
    pub index: usize,
    pub nodes: Vec<usize>,
    pub values: Vec<f64>,
    /// `log₂` of successive difference ratios; `None` where saturated.
    pub orders: Vec<Option<f64>>,
    /// Last finite order estimate.
    pub order: Option<f64>,
    /// Differences fell to round-off: the data are exact at these sizes.
    pub saturated: bool,
}

/// Orders from values on a doubling sequence of grids.
pub fn estimate_order(values: &[f64]) -> Result<(Vec<Option<f64>>, bool)> {
    if values.len() < 3 {
        return Err(Error::InvalidInput("order estimate needs at least 3 grid sizes".into()));
    }
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let floor = 64.0 * f64::EPSILON * scale;
    let mut saturated = false;
    let orders = values
        .windows(3)
        .map(|w| {
            let (d1, d2) = (w[0] - w[1], w[1] - w[2]);
            if d2.abs() <= floor {
                saturated = true;
                None
            } else {
                Some((d1 / d2).abs().log2())
            }
        })
        .collect();
    Ok((orders, saturated))
}

/// The `index`-th eigenvalue of mode `m` on grids `nodes` (each twice the
/// previous), and the observed order of convergence.
pub fn convergence_study(eps: f64, m: u32, index: usize, nodes: &[usize]) -> Result<ConvergenceStudy> {
    if nodes.len() < 3 {
        return Err(Error::InvalidInput("convergence study needs at least 3 grid sizes".into()));
    }
    if nodes.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidInput("grid sizes must double".into()));
    }
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&n| {
            let grid = build_grid_with(eps, m, n, DEFAULT_GRID_C)?;
            Ok(mode_eigenvalues(&grid, index + 1)?[index].lambda)
        })
        .collect::<Result<_>>()?;
    let (orders, saturated) = estimate_order(&values)?;
    Ok(ConvergenceStudy {
        eps,
        m,
        index,
        nodes: nodes.to_vec(),
        order: orders.iter().rev().flatten().next().copied(),
        values,
        orders,
        saturated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub coeff_options: CoeffOptions,
    /// Wall time per stage, seconds.
    pub timings: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub fits: Vec<ExpansionFit>,
    pub ellipse: Vec<EllipseCheck>,
    pub convergence: Vec<ConvergenceStudy>,
    pub thresholds: Thresholds,
    pub flags: BTreeMap<String, bool>,
    pub provenance: Provenance,
}

impl ValidationReport {
    pub fn new(
        fits: Vec<ExpansionFit>,
        ellipse: Vec<EllipseCheck>,
        convergence: Vec<ConvergenceStudy>,
        thresholds: Thresholds,
        provenance: Provenance,
    ) -> Self {
        let mut flags = BTreeMap::new();
        for f in &fits {
            flags.insert(format!("{}.c1", f.selector), f.c1_pass);
            flags.insert(format!("{}.c2", f.selector), f.c2_pass);
            flags.insert(format!("{}.remainder", f.selector), f.remainder_pass);
        }
        for e in &ellipse {
            flags.insert(format!("ellipse.k{}", e.k), e.pass);
        }
        for c in &convergence {
            let pass = c
                .order
                .is_some_and(|o| (thresholds.order_min..=thresholds.order_max).contains(&o));
            flags.insert(format!("convergence.eps{}.m{}.i{}", c.eps, c.m, c.index), pass);
        }
        Self {
            fits,
            ellipse,
            convergence,
            thresholds,
            flags,
            provenance,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.flags.values().all(|&v| v)
    }
}
