//! Symmetric tridiagonal eigenproblems, optionally generalized with a
//! positive diagonal mass matrix.
//!
//! Eigenvalues come from bisection on Sturm sequences (LDLᵀ inertia of
//! `A - x M`), eigenvectors from inverse iteration on the reduced matrix
//! `M^{-1/2} A M^{-1/2}`. Only the `k` smallest eigenpairs are extracted,
//! which keeps the cost at `O(N k)` per bisection step.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalSystem {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
    mass_diagonal: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigenpair {
    pub value: f64,
    /// Normalized to unit Euclidean norm in the original (unreduced)
    /// coordinates.
    pub vector: Option<Vec<f64>>,
}

impl TridiagonalSystem {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        Self::build(diagonal, off_diagonal, None)
    }

    pub fn with_mass(diagonal: Vec<f64>, off_diagonal: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        Self::build(diagonal, off_diagonal, Some(mass))
    }

    fn build(diagonal: Vec<f64>, off_diagonal: Vec<f64>, mass: Option<Vec<f64>>) -> Result<Self> {
        let n = diagonal.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty tridiagonal system".into()));
        }
        if off_diagonal.len() + 1 != n {
            return Err(Error::DimensionMismatch(format!(
                "off-diagonal has length {} but diagonal has length {n}",
                off_diagonal.len()
            )));
        }
        if let Some(m) = &mass {
            if m.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "mass diagonal has length {} but diagonal has length {n}",
                    m.len()
                )));
            }
            if let Some((index, &value)) = m.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
                return Err(Error::NonPositiveMass { index, value });
            }
        }
        Ok(Self {
            diagonal,
            off_diagonal,
            mass_diagonal: mass,
        })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn mass_diagonal(&self) -> Option<&[f64]> {
        self.mass_diagonal.as_deref()
    }

    fn mass(&self, i: usize) -> f64 {
        self.mass_diagonal.as_ref().map_or(1.0, |m| m[i])
    }

    /// Number of eigenvalues strictly below `x` (inertia of `A - x M`).
    pub fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i == 0 {
                0.0
            } else {
                let e = self.off_diagonal[i - 1];
                e * e / q
            };
            q = self.diagonal[i] - x * self.mass(i) - coupling;
            if q == 0.0 {
                q = -f64::MIN_POSITIVE.sqrt() * (1.0 + x.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `M^{-1/2} A M^{-1/2}` as (diagonal, off-diagonal).
    fn reduced(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.mass_diagonal {
            None => (self.diagonal.clone(), self.off_diagonal.clone()),
            Some(m) => {
                let d = self.diagonal.iter().zip(m).map(|(a, b)| a / b).collect();
                let e = self
                    .off_diagonal
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v / (m[i] * m[i + 1]).sqrt())
                    .collect();
                (d, e)
            }
        }
    }

    /// Gershgorin interval of the reduced matrix.
    fn spectral_bounds(&self) -> (f64, f64) {
        let (d, e) = self.reduced();
        let n = d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { e[i].abs() } else { 0.0 };
            lo = lo.min(d[i] - left - right);
            hi = hi.max(d[i] + left + right);
        }
        let pad = 1e-12 * (hi - lo).abs().max(hi.abs()).max(1.0);
        (lo - pad, hi + pad)
    }

    /// `‖A f - λ M f‖₂`.
    pub fn residual_norm(&self, value: f64, f: &[f64]) -> f64 {
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n {
            let mut r = (self.diagonal[i] - value * self.mass(i)) * f[i];
            if i > 0 {
                r += self.off_diagonal[i - 1] * f[i - 1];
            }
            if i + 1 < n {
                r += self.off_diagonal[i] * f[i + 1];
            }
            acc += r * r;
        }
        acc.sqrt()
    }
}

/// The `k` smallest eigenpairs of `sys`, ascending.
pub fn tridiag_eigen_smallest(
    sys: &TridiagonalSystem,
    k: usize,
    want_vectors: bool,
) -> Result<Vec<TridiagEigenpair>> {
    let n = sys.len();
    if k == 0 || k > n {
        return Err(Error::DimensionMismatch(format!(
            "requested {k} eigenvalues of a system of size {n}"
        )));
    }
    let values = bisect_smallest(sys, k);
    if !want_vectors {
        return Ok(values
            .into_iter()
            .map(|value| TridiagEigenpair { value, vector: None })
            .collect());
    }

    let (d, e) = sys.reduced();
    let mut reduced_vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    for (j, &value) in values.iter().enumerate() {
        // Neighbours close enough that inverse iteration alone cannot
        // separate their vectors.
        let cluster: Vec<usize> = (0..j)
            .filter(|&i| (values[i] - value).abs() <= 1e-7 * (1.0 + value.abs()))
            .collect();
        let y = inverse_iteration(&d, &e, value, j, &cluster, &reduced_vectors);
        let mut f: Vec<f64> = match sys.mass_diagonal() {
            None => y.clone(),
            Some(m) => y.iter().zip(m).map(|(a, b)| a / b.sqrt()).collect(),
        };
        normalize(&mut f);
        reduced_vectors.push(y);
        out.push(TridiagEigenpair {
            value,
            vector: Some(f),
        });
    }
    Ok(out)
}

fn bisect_smallest(sys: &TridiagonalSystem, k: usize) -> Vec<f64> {
    const MAX_STEPS: usize = 200;
    let (lo0, hi0) = sys.spectral_bounds();
    let mut lo = vec![lo0; k];
    let mut hi = vec![hi0; k];
    for j in 0..k {
        for _ in 0..MAX_STEPS {
            let (a, b) = (lo[j], hi[j]);
            let mid = 0.5 * (a + b);
            let width = b - a;
            if width <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) || !(a < mid && mid < b) {
                break;
            }
            let c = sys.sturm_count(mid);
            // Every count tightens the brackets of all later eigenvalues too.
            for (i, (l, h)) in lo.iter_mut().zip(hi.iter_mut()).enumerate().skip(j) {
                if c > i {
                    *h = h.min(mid);
                } else {
                    *l = l.max(mid);
                }
            }
        }
    }
    lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn orthogonalize(v: &mut [f64], against: &[usize], basis: &[Vec<f64>]) {
    for &i in against {
        let u = &basis[i];
        let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
    }
}

fn inverse_iteration(
    d: &[f64],
    e: &[f64],
    value: f64,
    seed: usize,
    cluster: &[usize],
    basis: &[Vec<f64>],
) -> Vec<f64> {
    let n = d.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = d
        .iter()
        .map(|x| x.abs())
        .chain(e.iter().map(|x| x.abs()))
        .fold(0.0_f64, f64::max)
        .max(value.abs())
        .max(f64::MIN_POSITIVE);
    // Nudge off the exact eigenvalue so the factorization stays nonsingular.
    let shift = value + 4.0 * f64::EPSILON * scale;
    let lu = TridiagLu::factor(d, e, shift, scale);

    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * (((i * 7919 + seed * 104_729) % 1000) as f64 / 1000.0 - 0.5))
        .collect();
    orthogonalize(&mut v, cluster, basis);
    normalize(&mut v);
    for _ in 0..4 {
        lu.solve(&mut v);
        orthogonalize(&mut v, cluster, basis);
        normalize(&mut v);
    }
    // Deterministic sign: first significant component positive.
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

/// LU factorization with partial pivoting of `T - σI`, `T` symmetric
/// tridiagonal. `U` has two superdiagonals.
struct TridiagLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(d: &[f64], e: &[f64], shift: f64, scale: f64) -> Self {
        let n = d.len();
        let tiny = f64::EPSILON * scale;
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swapped = vec![false; n];

        // Current row i holds (a, b, c) at columns (i, i+1, i+2).
        let mut a = d[0] - shift;
        let mut b = if n > 1 { e[0] } else { 0.0 };
        for i in 0..n - 1 {
            let below_diag = e[i];
            let below_next = d[i + 1] - shift;
            let below_next2 = if i + 2 < n { e[i + 1] } else { 0.0 };
            if below_diag.abs() > a.abs() {
                swapped[i] = true;
                let m = a / below_diag;
                l[i] = m;
                u0[i] = below_diag;
                u1[i] = below_next;
                u2[i] = below_next2;
                a = b - m * below_next;
                b = -m * below_next2;
            } else {
                let pivot = if a.abs() < tiny { tiny.copysign(a + 0.0) } else { a };
                let m = below_diag / pivot;
                l[i] = m;
                u0[i] = pivot;
                u1[i] = b;
                u2[i] = 0.0;
                a = below_next - m * b;
                b = below_next2;
            }
        }
        u0[n - 1] = if a.abs() < tiny { tiny.copysign(a + 0.0) } else { a };
        Self {
            u0,
            u1,
            u2,
            l,
            swapped,
        }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.l[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            x[i] = s / self.u0[i];
        }
        let peak = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if peak > 1e150 {
            x.iter_mut().for_each(|v| *v /= peak);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn three_by_three_laplacian() {
        let sys = TridiagonalSystem::new(vec![2.0; 3], vec![-1.0; 2]).unwrap();
        let pairs = tridiag_eigen_smallest(&sys, 3, true).unwrap();
        let s = 2f64.sqrt();
        for (p, expected) in pairs.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
            assert_relative_eq!(p.value, expected, epsilon = 1e-14);
            let v = p.vector.as_ref().unwrap();
            assert!(sys.residual_norm(p.value, v) <= 1e-8 * (1.0 + p.value.abs()));
        }
    }

    #[test]
    fn identity_spectrum() {
        let sys = TridiagonalSystem::new(vec![1.0; 5], vec![0.0; 4]).unwrap();
        let pairs = tridiag_eigen_smallest(&sys, 5, true).unwrap();
        assert!(pairs.iter().all(|p| (p.value - 1.0).abs() < 1e-15));
        // Degenerate cluster still yields an orthonormal set.
        for i in 0..5 {
            for j in 0..5 {
                let dot: f64 = pairs[i]
                    .vector
                    .as_ref()
                    .unwrap()
                    .iter()
                    .zip(pairs[j].vector.as_ref().unwrap())
                    .map(|(a, b)| a * b)
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-10, "({i},{j}) -> {dot}");
            }
        }
    }

    #[test]
    fn finite_difference_dirichlet_laplacian() {
        let n = 100;
        let h = 1.0 / 101.0;
        let sys =
            TridiagonalSystem::new(vec![2.0 / (h * h); n], vec![-1.0 / (h * h); n - 1]).unwrap();
        let pairs = tridiag_eigen_smallest(&sys, 10, true).unwrap();
        for (j, p) in pairs.iter().enumerate() {
            let theta = (j + 1) as f64 * std::f64::consts::PI / 101.0;
            let exact = (2.0 - 2.0 * theta.cos()) / (h * h);
            assert_relative_eq!(p.value, exact, max_relative = 1e-12);
            let v = p.vector.as_ref().unwrap();
            assert!(sys.residual_norm(p.value, v) <= 1e-8 * (1.0 + p.value.abs()));
        }
    }

    #[test]
    fn generalized_problem_matches_scaled_problem() {
        // A f = λ M f with M = 2I is the standard problem with λ halved.
        let a = TridiagonalSystem::new(vec![2.0; 6], vec![-1.0; 5]).unwrap();
        let b = TridiagonalSystem::with_mass(vec![2.0; 6], vec![-1.0; 5], vec![2.0; 6]).unwrap();
        let pa = tridiag_eigen_smallest(&a, 6, false).unwrap();
        let pb = tridiag_eigen_smallest(&b, 6, true).unwrap();
        for (x, y) in pa.iter().zip(&pb) {
            assert_relative_eq!(x.value, 2.0 * y.value, max_relative = 1e-13);
            let v = y.vector.as_ref().unwrap();
            assert!(b.residual_norm(y.value, v) <= 1e-8 * (1.0 + y.value.abs()));
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            TridiagonalSystem::new(vec![1.0; 3], vec![0.0; 3]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            TridiagonalSystem::with_mass(vec![1.0; 2], vec![0.0], vec![1.0, 0.0]),
            Err(Error::NonPositiveMass { index: 1, .. })
        ));
        let sys = TridiagonalSystem::new(vec![1.0; 3], vec![0.0; 2]).unwrap();
        assert!(tridiag_eigen_smallest(&sys, 4, false).is_err());
        assert!(tridiag_eigen_smallest(&sys, 0, false).is_err());
    }
}
