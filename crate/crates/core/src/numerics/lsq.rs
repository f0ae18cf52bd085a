//! Small linear least-squares problems: the two-term `ε² ln ε`, `ε²` fit
//! and the `δ → 0` extrapolation in the basis `{1, √δ, δ}`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coeffs: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// Diagonal of `(XᵀX)⁻¹`, for standard errors.
    pub inverse_gram_diagonal: Vec<f64>,
}

/// Householder QR least squares on a design given row by row.
pub fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Result<LeastSquares> {
    let rows = design.len();
    if rows != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{rows} design rows but {} observations",
            y.len()
        )));
    }
    let cols = design.first().map_or(0, Vec::len);
    if cols == 0 || design.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch("ragged or empty design".into()));
    }
    if rows < cols {
        return Err(Error::DegenerateDesign(format!(
            "{rows} observations for {cols} unknowns"
        )));
    }

    // Unit-norm column scaling keeps the rank test meaningful when the
    // columns live on very different scales.
    let col_norms: Vec<f64> = (0..cols)
        .map(|j| design.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
        .collect();
    if let Some(j) = col_norms.iter().position(|&n| !(n > 0.0) || !n.is_finite()) {
        return Err(Error::DegenerateDesign(format!("design column {j} vanishes")));
    }
    let mut a: Vec<Vec<f64>> = design
        .iter()
        .map(|r| r.iter().zip(&col_norms).map(|(v, n)| v / n).collect())
        .collect();
    let mut b = y.to_vec();

    for k in 0..cols {
        let norm = (k..rows).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            return Err(Error::DegenerateDesign(format!(
                "design columns are (numerically) collinear at column {k}"
            )));
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for j in k..cols {
                let dot: f64 = (k..rows).map(|i| v[i - k] * a[i][j]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k..rows {
                    a[i][j] -= f * v[i - k];
                }
            }
            let dot: f64 = (k..rows).map(|i| v[i - k] * b[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..rows {
                b[i] -= f * v[i - k];
            }
        }
    }

    // Back substitution for the scaled coefficients.
    let mut scaled = vec![0.0; cols];
    for k in (0..cols).rev() {
        let s: f64 = (k + 1..cols).map(|j| a[k][j] * scaled[j]).sum();
        scaled[k] = (b[k] - s) / a[k][k];
    }
    let coeffs: Vec<f64> = scaled.iter().zip(&col_norms).map(|(c, n)| c / n).collect();

    // R⁻¹ for the covariance diagonal, (XᵀX)⁻¹ = D⁻¹ R⁻¹ R⁻ᵀ D⁻¹.
    let mut rinv = vec![vec![0.0; cols]; cols];
    for i in 0..cols {
        rinv[i][i] = 1.0 / a[i][i];
        for j in i + 1..cols {
            let s: f64 = (i..j).map(|k| rinv[i][k] * a[k][j]).sum();
            rinv[i][j] = -s / a[j][j];
        }
    }
    let inverse_gram_diagonal = (0..cols)
        .map(|i| (i..cols).map(|j| rinv[i][j] * rinv[i][j]).sum::<f64>() / (col_norms[i] * col_norms[i]))
        .collect();

    let residuals: Vec<f64> = design
        .iter()
        .zip(y)
        .map(|(r, yi)| yi - r.iter().zip(&coeffs).map(|(x, c)| x * c).sum::<f64>())
        .collect();
    let rss = residuals.iter().map(|r| r * r).sum();
    Ok(LeastSquares {
        coeffs,
        residuals,
        rss,
        inverse_gram_diagonal,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoTermFit {
    /// Coefficient of `ε² ln ε`.
    pub c1: f64,
    /// Coefficient of `ε²`.
    pub c2: f64,
    pub rms_residual: f64,
}

/// Fit `λ_direct - λ_limit ≈ c1 ε² ln ε + c2 ε²` with `λ_limit` held fixed.
///
/// Points are sorted by `ε` before fitting, so the result does not depend on
/// the order they are supplied in.
pub fn fit_two_term(points: &[(f64, f64)], lambda_limit: f64) -> Result<TwoTermFit> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "two-term fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(eps, _)) = points.iter().find(|(e, _)| !(*e > 0.0 && *e < 1.0)) {
        return Err(Error::DomainError(format!("epsilon {eps} outside (0, 1)")));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::DegenerateDesign("repeated epsilon value".into()));
    }
    let design: Vec<Vec<f64>> = sorted
        .iter()
        .map(|&(e, _)| vec![e * e * e.ln(), e * e])
        .collect();
    let y: Vec<f64> = sorted.iter().map(|&(_, l)| l - lambda_limit).collect();
    let fit = least_squares(&design, &y)?;
    Ok(TwoTermFit {
        c1: fit.coeffs[0],
        c2: fit.coeffs[1],
        rms_residual: (fit.rss / sorted.len() as f64).sqrt(),
    })
}

/// Samples `I(δ)` of a regularized integral, `δ` strictly decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrtDeltaSeries {
    samples: Vec<(f64, f64)>,
}

impl SqrtDeltaSeries {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "extrapolation needs at least 3 samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|&(d, v)| !(d > 0.0) || !v.is_finite()) {
            return Err(Error::DomainError("delta must be positive and values finite".into()));
        }
        if samples.windows(2).any(|w| !(w[1].0 < w[0].0)) {
            return Err(Error::InvalidInput("delta values must be strictly decreasing".into()));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtDeltaFit {
    pub limit: f64,
    pub error_estimate: f64,
    pub sqrt_coeff: f64,
    pub linear_coeff: f64,
}

/// Fit `I(δ) = I₀ + c √δ + d δ` and return `I₀`.
///
/// With more than three samples the error estimate is the standard error of
/// `I₀`; with exactly three (an interpolant) it is the change in `I₀` when
/// the `δ` term is dropped.
pub fn extrapolate_sqrt_delta(series: &SqrtDeltaSeries) -> Result<SqrtDeltaFit> {
    let s = series.samples();
    let design: Vec<Vec<f64>> = s.iter().map(|&(d, _)| vec![1.0, d.sqrt(), d]).collect();
    let y: Vec<f64> = s.iter().map(|&(_, v)| v).collect();
    let fit = least_squares(&design, &y)?;
    let dof = s.len() - 3;
    let error_estimate = if dof > 0 {
        (fit.rss / dof as f64 * fit.inverse_gram_diagonal[0]).sqrt()
    } else {
        let reduced: Vec<Vec<f64>> = design.iter().map(|r| r[..2].to_vec()).collect();
        let coarse = least_squares(&reduced, &y)?;
        (coarse.coeffs[0] - fit.coeffs[0]).abs()
    };
    Ok(SqrtDeltaFit {
        limit: fit.coeffs[0],
        error_estimate,
        sqrt_coeff: fit.coeffs[1],
        linear_coeff: fit.coeffs[2],
    })
}
