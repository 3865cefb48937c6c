//! Jacobi theta function with a certified truncation tail.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `theta(z, tau) = sum_k exp(i pi tau k^2 + 2 i pi k z)` for `Im(tau) > 0`.
///
/// Returns the truncated sum together with a certified absolute bound on the
/// dropped tail (a geometric majorant of the Gaussian-decaying terms).
pub fn theta(z: Complex64, tau: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    if tau.im <= 0.0 {
        return Err(Error::Precondition(format!(
            "theta requires Im(tau) > 0, got {}",
            tau.im
        )));
    }
    let a = std::f64::consts::PI * tau.im; // Gaussian rate
    let s = 2.0 * std::f64::consts::PI * z.im; // linear tilt
    // |term_k| = exp(-a k^2 - s k); maximum near k* = -s / (2a).
    let center = (-s / (2.0 * a)).round() as i64;
    let log_mag = |k: i64| -a * (k as f64) * (k as f64) - s * k as f64;

    let mut half_width = 4i64;
    loop {
        let lo = center - half_width;
        let hi = center + half_width;
        // Geometric majorant on each side: ratio of consecutive magnitudes.
        let tail_side = |edge: i64, dir: i64| -> Option<f64> {
            let first = log_mag(edge + dir).exp();
            let ratio = (log_mag(edge + 2 * dir) - log_mag(edge + dir)).exp();
            if ratio < 0.5 {
                Some(first / (1.0 - ratio))
            } else {
                None
            }
        };
        if let (Some(tl), Some(tr)) = (tail_side(lo, -1), tail_side(hi, 1)) {
            let tail = tl + tr;
            if tail <= tol {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in lo..=hi {
                    let kf = k as f64;
                    let exponent = Complex64::new(0.0, std::f64::consts::PI) * tau * kf * kf
                        + Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z * kf;
                    acc += exponent.exp();
                }
                return Ok((acc, tail));
            }
        }
        half_width *= 2;
        if half_width > 1 << 22 {
            return Err(Error::Truncation(format!(
                "theta tail cannot reach {tol} at tau = {tau}"
            )));
        }
    }
}
