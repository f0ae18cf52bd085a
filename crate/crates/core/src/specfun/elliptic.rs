use std::f64::consts::FRAC_PI_2;

use crate::{Error, Result};

/// Complete elliptic integral of the second kind in the **parameter**
/// convention:
///
/// `E(m) = ∫₀^{π/2} √(1 - m sin²θ) dθ`, `0 ≤ m ≤ 1`.
///
/// References that use the modulus `k` have `m = k²`. The quarter perimeter
/// of the ellipse with semi-axes 1 and ε is `E(1 - ε²)`.
///
/// Computed with the arithmetic–geometric mean:
/// `K = π / (2 AGM(1, √(1-m)))` and `E = K (1 - Σ 2^{n-1} c_n²)`.
pub fn elliptic_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::DomainError(format!(
            "elliptic parameter m = {m} outside [0, 1]"
        )));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    let mut weight = 0.5;
    let mut sum = weight * m;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        let next_b = (a * b).sqrt();
        weight *= 2.0;
        sum += weight * c * c;
        a = next_a;
        b = next_b;
        if c.abs() <= f64::EPSILON * a {
            break;
        }
    }
    Ok(FRAC_PI_2 / a * (1.0 - sum))
}
