//! The kernel convergence study across degeneracy sweeps.

use crate::error::Result;
use crate::model::{Grid, RealField, TorusConfig};
use crate::projector::kernel::{diagonal_field, momentum_diagonal_field, norm_h_sq};
use crate::projector::localized::{localized_trace_field, Localizer};
use crate::projector::default_lambda;
use crate::basis::hermite_pair;

/// One row of the convergence study.
#[derive(Clone, Copy, Debug)]
pub struct StudyRow {
    pub level: usize,
    pub degeneracy: usize,
    pub magnetic_length: f64,
    /// `sup_z |2 pi l_b^2 Pi_n(z,z) - 1|`.
    pub diagonal_deviation: f64,
    /// Ratio of the diagonal deviation to `l_b`.
    pub deviation_over_lb: f64,
    /// `|Tr[Pi_n] - d|`.
    pub trace_error: f64,
    /// `sup_z || (P Pi_n)(z,z) - reference ||` over `b`.
    pub momentum_deviation_over_b: f64,
    /// The two components of the displayed Hermite reference integral.
    pub reference_integral: (f64, f64),
    /// `sup_R |2 pi l_b^2 Tr[Pi_{n,R}] - 1|` at the default localizer scale,
    /// when the scale is resolved on the grid.
    pub localized_trace_deviation: Option<f64>,
}

/// The 1D reference integral of the momentum diagonal: the two components
/// of `integral (i h_n'(u), u h_n(u)) h_n(u) e^{-u^2} du` by direct
/// quadrature (the imaginary unit carried symbolically; both components
/// vanish by parity).
pub fn hermite_reference_integral(n: usize) -> (f64, f64) {
    let h = 2.0e-4;
    let range = 12.0 + 2.0 * (n as f64).sqrt();
    let steps = (2.0 * range / h) as usize;
    let mut first = 0.0;
    let mut second = 0.0;
    for s in 0..steps {
        let u = -range + (s as f64 + 0.5) * h;
        let gauss = (-u * u / 2.0).exp();
        let (h_prev, h_cur) = hermite_pair(n, u);
        let hn = h_cur * gauss;
        let hn_deriv = (2.0 * n as f64 * h_prev - u * h_cur) * gauss;
        let weight = (-u * u).exp() * h;
        first += hn_deriv * hn * weight;
        second += u * hn * hn * weight;
    }
    (first, second)
}

/// Runs the convergence study for the given levels and degeneracies.
pub fn kernel_convergence_study(
    levels: &[usize],
    degeneracies: &[usize],
    length: f64,
    hbar: f64,
    grid: Grid,
    tol: f64,
) -> Result<Vec<StudyRow>> {
    let mut rows = Vec::new();
    for &n in levels {
        for &d in degeneracies {
            let cfg = TorusConfig::basis_only(length, d, hbar)?;
            let lb = cfg.magnetic_length();
            let lb2 = cfg.magnetic_length_sq();
            let b = cfg.field_amplitude();
            let two_pi = 2.0 * std::f64::consts::PI;

            let diag = diagonal_field(&cfg, n, grid, tol)?;
            let diagonal_deviation = diag
                .values
                .iter()
                .fold(0.0f64, |m, &v| m.max((two_pi * lb2 * v - 1.0).abs()));
            let trace_error = (diag.integrate() - d as f64).abs();

            let (mx, my) = momentum_diagonal_field(&cfg, n, grid, tol)?;
            let reference_integral = hermite_reference_integral(n);
            let norm = norm_h_sq(n);
            // Reference vector (b/l_b) (i I1, I2) / (2 pi ||h_n||^2); the
            // first component is purely imaginary.
            let ref_x = b / lb * reference_integral.0 / (two_pi * norm);
            let ref_y = b / lb * reference_integral.1 / (two_pi * norm);
            let mut momentum_dev = 0.0f64;
            for (vx, vy) in mx.flat().iter().zip(my.flat()) {
                let dx = (*vx - num_complex::Complex64::new(0.0, ref_x)).norm();
                let dy = (*vy - num_complex::Complex64::new(ref_y, 0.0)).norm();
                momentum_dev = momentum_dev.max((dx * dx + dy * dy).sqrt());
            }

            let localized_trace_deviation = match Localizer::build(default_lambda(&cfg), grid)
            {
                Ok(loc) => {
                    let trace = localized_trace_field(&diag, &loc)?;
                    Some(localized_deviation(&trace, lb2))
                }
                Err(_) => None,
            };

            rows.push(StudyRow {
                level: n,
                degeneracy: d,
                magnetic_length: lb,
                diagonal_deviation,
                deviation_over_lb: diagonal_deviation / lb,
                trace_error,
                momentum_deviation_over_b: momentum_dev / b,
                reference_integral,
                localized_trace_deviation,
            });
        }
    }
    Ok(rows)
}

fn localized_deviation(trace: &RealField, lb2: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    trace
        .values
        .iter()
        .fold(0.0f64, |m, &t| m.max((two_pi * lb2 * t - 1.0).abs()))
}

/// Least-squares slope of `log(y)` against `log(x)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
