//! Bessel functions `J_ν` of integer order and their positive zeros.
//!
//! Small arguments use the power series. Elsewhere all orders `0..=n` come
//! from Miller's backward recurrence normalized by
//! `J₀ + 2 Σ J_{2k} = 1`, which stays accurate in the oscillatory region
//! where the series cancels catastrophically.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest order accepted by the public entry points.
pub const MAX_ORDER: u32 = 50;

/// Series is used while its terms do not grow (`x²/4 ≤ ν + 1`) or the
/// argument is small enough that cancellation costs < 2 digits.
const SERIES_LIMIT: f64 = 8.0;

fn check_args(nu: u32, x: f64) -> Result<()> {
    if nu > MAX_ORDER {
        return Err(Error::DomainError(format!(
            "Bessel order {nu} exceeds {MAX_ORDER}"
        )));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::DomainError(format!(
            "Bessel argument {x} must be finite and non-negative"
        )));
    }
    Ok(())
}

pub fn bessel_j(nu: u32, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    Ok(j_unchecked(nu, x))
}

/// `J'_ν(x)` from `J'_ν = J_{ν-1} - (ν/x) J_ν` (`J'₀ = -J₁`).
pub fn bessel_j_deriv(nu: u32, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    Ok(j_deriv_unchecked(nu, x))
}

/// `(J_ν(x), J'_ν(x))` with one recurrence pass.
pub(crate) fn bessel_j_pair(nu: u32, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (j_unchecked(nu, 0.0), j_deriv_unchecked(nu, 0.0));
    }
    let j = bessel_j_orders(nu + 1, x);
    let n = nu as usize;
    let deriv = if nu == 0 {
        -j[1]
    } else {
        j[n - 1] - f64::from(nu) / x * j[n]
    };
    (j[n], deriv)
}

fn j_unchecked(nu: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    if use_series(nu, x) {
        series(nu, x)
    } else {
        bessel_j_orders(nu, x)[nu as usize]
    }
}

fn j_deriv_unchecked(nu: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 1 { 0.5 } else { 0.0 };
    }
    if nu == 0 {
        -j_unchecked(1, x)
    } else {
        j_unchecked(nu - 1, x) - f64::from(nu) / x * j_unchecked(nu, x)
    }
}

fn use_series(nu: u32, x: f64) -> bool {
    x <= SERIES_LIMIT || 0.25 * x * x <= f64::from(nu) + 1.0
}

fn series(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=nu {
        term *= half / f64::from(k);
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..500 {
        let kf = f64::from(k);
        term *= q / (kf * (kf + f64::from(nu)));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J_0(x), …, J_n(x)` for `x > 0` by Miller's algorithm.
pub(crate) fn bessel_j_orders(n: u32, x: f64) -> Vec<f64> {
    let n = n as usize;
    if x == 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    if x <= SERIES_LIMIT && n <= 2 {
        return (0..=n as u32).map(|k| series(k, x)).collect();
    }
    let top = (n as f64).max(x);
    let mut start = (top + 20.0 + (160.0 * top).sqrt()) as usize;
    start += start % 2;

    let mut vals = vec![0.0; n + 1];
    let mut above = 0.0_f64; // J_{j+1}
    let mut current = 1e-30_f64; // J_j
    let mut norm = 0.0_f64;
    for j in (1..=start).rev() {
        if j <= n {
            vals[j] = current;
        }
        if j % 2 == 0 {
            norm += 2.0 * current;
        }
        let below = 2.0 * j as f64 / x * current - above;
        above = current;
        current = below;
        if current.abs() > 1e200 {
            current *= 1e-200;
            above *= 1e-200;
            norm *= 1e-200;
            vals.iter_mut().for_each(|v| *v *= 1e-200);
        }
    }
    vals[0] = current;
    norm += current;
    vals.iter_mut().for_each(|v| *v /= norm);
    vals
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZeroKind {
    /// Zero of `J_ν`.
    #[serde(rename = "zero_of_J")]
    J,
    /// Zero of `J'_ν`, excluding `x = 0`.
    #[serde(rename = "zero_of_J_prime")]
    JPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselZero {
    pub order: u32,
    pub index: u32,
    pub kind: ZeroKind,
    pub location: f64,
}

fn target(kind: ZeroKind, nu: u32, x: f64) -> f64 {
    match kind {
        ZeroKind::J => j_unchecked(nu, x),
        ZeroKind::JPrime => j_deriv_unchecked(nu, x),
    }
}

/// Value and derivative of the function whose zero is sought.
fn target_with_slope(kind: ZeroKind, nu: u32, x: f64) -> (f64, f64) {
    let (j, dj) = bessel_j_pair(nu, x);
    match kind {
        ZeroKind::J => (j, dj),
        ZeroKind::JPrime => {
            let nuf = f64::from(nu);
            // Bessel's equation: J'' = -J'/x - (1 - ν²/x²) J.
            (dj, -dj / x - (1.0 - nuf * nuf / (x * x)) * j)
        }
    }
}

/// McMahon's large-zero expansion, used as the Newton starting point.
fn mcmahon(kind: ZeroKind, nu: u32, k: u32) -> f64 {
    let mu = 4.0 * f64::from(nu) * f64::from(nu);
    let pi = std::f64::consts::PI;
    match kind {
        ZeroKind::J => {
            let b = (f64::from(k) + 0.5 * f64::from(nu) - 0.25) * pi;
            let e = 8.0 * b;
            b - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
        }
        ZeroKind::JPrime => {
            // J'₀ = -J₁, whose zero at the origin is excluded here.
            let k = if nu == 0 { k + 1 } else { k };
            let b = (f64::from(k) + 0.5 * f64::from(nu) - 0.75) * pi;
            let e = 8.0 * b;
            b - (mu + 3.0) / e
                - 4.0 * (7.0 * mu * mu + 82.0 * mu - 9.0) / (3.0 * e.powi(3))
        }
    }
}

/// Scan start: no positive zero of either kind lies below `ν` (and `J'₀`
/// is nonzero on `(0, 3.8)`).
fn scan_start(kind: ZeroKind, nu: u32) -> f64 {
    match (kind, nu) {
        (ZeroKind::J, 0) => 0.0,
        (ZeroKind::JPrime, 0) => 0.5,
        _ => f64::from(nu),
    }
}

/// Step well below the smallest gap between consecutive zeros (> 2.5).
const SCAN_STEP: f64 = 0.25;

/// Brackets of consecutive sign changes, in increasing order, until
/// `stop(count, right_end)` says to finish.
fn bracket_zeros(
    kind: ZeroKind,
    nu: u32,
    mut stop: impl FnMut(usize, f64) -> bool,
) -> Vec<(f64, f64)> {
    let mut brackets = Vec::new();
    let mut a = scan_start(kind, nu);
    let mut fa = target(kind, nu, a);
    loop {
        let b = a + SCAN_STEP;
        if stop(brackets.len(), a) {
            break;
        }
        let fb = target(kind, nu, b);
        if fa == 0.0 && a > 0.0 {
            brackets.push((a, a));
        } else if fa * fb < 0.0 {
            brackets.push((a, b));
        }
        a = b;
        fa = fb;
    }
    brackets
}

fn refine(kind: ZeroKind, nu: u32, index: u32, (mut a, mut b): (f64, f64)) -> f64 {
    if a == b {
        return a;
    }
    let mut fa = target(kind, nu, a);
    // Bisection to a narrow bracket, then safeguarded Newton.
    while b - a > 1e-3 {
        let m = 0.5 * (a + b);
        let fm = target(kind, nu, m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let guess = mcmahon(kind, nu, index);
    let mut x = if guess > a && guess < b { guess } else { 0.5 * (a + b) };
    for _ in 0..50 {
        let (f, df) = target_with_slope(kind, nu, x);
        if f == 0.0 {
            return x;
        }
        if fa * f < 0.0 {
            b = x;
        } else {
            a = x;
            fa = f;
        }
        let mut next = x - f / df;
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            return next;
        }
        x = next;
    }
    x
}

/// The `k`-th positive zero (`k ≥ 1`) of `J_ν` or `J'_ν`.
pub fn bessel_zero(nu: u32, k: u32, kind: ZeroKind) -> Result<BesselZero> {
    if nu > MAX_ORDER {
        return Err(Error::DomainError(format!(
            "Bessel order {nu} exceeds {MAX_ORDER}"
        )));
    }
    if k == 0 || k > 100 {
        return Err(Error::DomainError(format!(
            "zero index {k} outside 1..=100"
        )));
    }
    let brackets = bracket_zeros(kind, nu, |found, _| found >= k as usize);
    let location = refine(kind, nu, k, brackets[k as usize - 1]);
    Ok(BesselZero {
        order: nu,
        index: k,
        kind,
        location,
    })
}

/// All positive zeros of the given kind that are `≤ x_max`, ascending.
pub fn bessel_zeros_below(nu: u32, kind: ZeroKind, x_max: f64) -> Result<Vec<BesselZero>> {
    if nu > MAX_ORDER {
        return Err(Error::DomainError(format!(
            "Bessel order {nu} exceeds {MAX_ORDER}"
        )));
    }
    let brackets = bracket_zeros(kind, nu, |_, right| right > x_max);
    Ok(brackets
        .into_iter()
        .enumerate()
        .map(|(i, br)| {
            let index = i as u32 + 1;
            BesselZero {
                order: nu,
                index,
                kind,
                location: refine(kind, nu, index, br),
            }
        })
        .filter(|z| z.location <= x_max)
        .collect())
}
