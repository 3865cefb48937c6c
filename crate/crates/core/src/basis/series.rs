//! Pointwise eigenfunction evaluation through two independent lattice series.

use num_complex::Complex64;

use crate::basis::hermite::{hermite_coeff_abs_sum, hermite_function};
use crate::basis::{direct_constant, poisson_constant, OrbitalIndex};
use crate::error::{Error, Result};
use crate::model::TorusConfig;

/// Which analytic series to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMethod {
    /// The defining sum over the period lattice (Gaussian in y).
    Direct,
    /// The Poisson resummation (Gaussian in x, slot decoupled into a phase).
    Poisson,
}

/// Certified truncation of a Hermite-Gaussian lattice sum.
///
/// The summand magnitudes are bounded by
/// `A_n max(1,|u|)^n exp(-u^2/2)` at the scaled offsets
/// `u_k = (t + k step)/l_b`; dropped terms beyond the window are dominated
/// by a geometric series once the boundary offset passes `sqrt(n)`.
#[derive(Clone, Copy, Debug)]
pub struct TruncationPolicy {
    /// Lattice half-width of the kept window around the nearest lattice
    /// point.
    pub half_width: usize,
    /// Certified absolute bound on the dropped tail, including the series
    /// prefactor.
    pub tail_bound: f64,
    /// Scaled offset `|u|` at which the window was cut.
    pub scaled_cut: f64,
}

impl TruncationPolicy {
    /// Certifies a window for level `n`, magnetic length `l_b`, lattice
    /// spacing `step` and overall series prefactor, so that the dropped
    /// tail is at most `tol`.
    pub fn certify(
        n: usize,
        l_b: f64,
        step: f64,
        prefactor: f64,
        tol: f64,
    ) -> Result<Self> {
        Self::certify_with(n, hermite_coeff_abs_sum(n), l_b, step, prefactor, tol)
    }

    /// General form: summand magnitudes bounded by
    /// `amplitude * max(1,|u|)^degree * exp(-u^2/2)`. Ladder-differentiated
    /// series gain one polynomial degree and use this entry point.
    pub fn certify_with(
        degree: usize,
        amplitude: f64,
        l_b: f64,
        step: f64,
        prefactor: f64,
        tol: f64,
    ) -> Result<Self> {
        let delta = step / l_b;
        let majorant =
            |u: f64| amplitude * u.abs().max(1.0).powi(degree as i32) * (-u * u / 2.0).exp();
        let mut half_width = 1usize;
        loop {
            let u0 = (half_width as f64 + 0.5) * delta;
            if u0 > (degree as f64).sqrt() + delta {
                let ratio = majorant(u0 + delta) / majorant(u0);
                if ratio < 0.5 {
                    let tail = 2.0 * prefactor * majorant(u0) / (1.0 - ratio);
                    if tail <= tol {
                        return Ok(Self { half_width, tail_bound: tail, scaled_cut: u0 });
                    }
                }
            }
            half_width += 1;
            if half_width > 10_000 {
                return Err(Error::Truncation(format!(
                    "no window of half-width <= 10000 certifies tail {tol} \
                     (degree = {degree}, step/l_b = {delta})"
                )));
            }
        }
    }
}

/// Series prefactor magnitude for the given method, used by tail
/// certification.
pub(crate) fn prefactor_magnitude(cfg: &TorusConfig, n: usize, method: EvalMethod) -> f64 {
    let l = cfg.length();
    let lb = cfg.magnetic_length();
    match method {
        EvalMethod::Direct => direct_constant(n).norm() / (l * lb).sqrt(),
        EvalMethod::Poisson => poisson_constant(n).norm() * lb.sqrt() / l.powf(1.5),
    }
}

pub(crate) fn lattice_step(cfg: &TorusConfig, method: EvalMethod) -> f64 {
    match method {
        EvalMethod::Direct => cfg.length(),
        EvalMethod::Poisson => cfg.length() / cfg.degeneracy() as f64,
    }
}

/// Evaluates `psi_{nl}` at an arbitrary point of the plane, certifying the
/// truncation tail to at most `tol`.
pub fn eigenfunction(
    cfg: &TorusConfig,
    idx: OrbitalIndex,
    point: (f64, f64),
    method: EvalMethod,
    tol: f64,
) -> Result<Complex64> {
    idx.check(cfg)?;
    let policy = TruncationPolicy::certify(
        idx.level,
        cfg.magnetic_length(),
        lattice_step(cfg, method),
        prefactor_magnitude(cfg, idx.level, method),
        tol,
    )?;
    Ok(eigenfunction_with_policy(cfg, idx, point, method, &policy))
}

/// Evaluates `psi_{nl}` with a precomputed truncation window.
pub fn eigenfunction_with_policy(
    cfg: &TorusConfig,
    idx: OrbitalIndex,
    point: (f64, f64),
    method: EvalMethod,
    policy: &TruncationPolicy,
) -> Complex64 {
    let (x, y) = point;
    let l = cfg.length();
    let lb = cfg.magnetic_length();
    let d = cfg.degeneracy() as f64;
    let n = idx.level;
    let slot = idx.slot as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    match method {
        EvalMethod::Direct => {
            let offset = y + slot * l / d;
            let center = (-offset / l).round() as i64;
            let k_lo = center - policy.half_width as i64;
            let k_hi = center + policy.half_width as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in k_lo..=k_hi {
                let u = (offset + k as f64 * l) / lb;
                let angle = two_pi * (slot + k as f64 * d) * x / l;
                acc += hermite_function(n, u) * Complex64::from_polar(1.0, angle);
            }
            direct_constant(n) / (l * lb).sqrt() * acc
        }
        EvalMethod::Poisson => {
            let step = l / d;
            let center = (-x / step).round() as i64;
            let k_lo = center - policy.half_width as i64;
            let k_hi = center + policy.half_width as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in k_lo..=k_hi {
                let v = (x + k as f64 * step) / lb;
                let angle = -two_pi * k as f64 * (y / l + slot / d);
                acc += hermite_function(n, v) * Complex64::from_polar(1.0, angle);
            }
            let gauge = Complex64::from_polar(1.0, -x * y * cfg.inv_magnetic_length_sq());
            poisson_constant(n) * lb.sqrt() / l.powf(1.5) * gauge * acc
        }
    }
}
