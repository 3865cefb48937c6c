//! The projector kernel as a double lattice sum.

use num_complex::Complex64;

use crate::basis::{
    factorial, hermite_coeff_abs_sum, hermite_function, hermite_pair, TruncationPolicy,
};
use crate::error::Result;
use crate::model::{ComplexField, Grid, RealField, TorusConfig};

/// `||h_n||^2 = sqrt(pi) 2^n n!`, the Hermite-function normalization that
/// scales the kernel.
pub fn norm_h_sq(n: usize) -> f64 {
    std::f64::consts::PI.sqrt() * 2.0f64.powi(n as i32) * factorial(n)
}

/// Crude sup bound on `|h_n|`, used to split tail budgets between the two
/// lattice directions.
fn hermite_sup_bound(n: usize) -> f64 {
    let a = hermite_coeff_abs_sum(n);
    let peak = (n as f64).max(1.0).sqrt();
    a * peak.powi(n as i32)
}

struct KernelWindows {
    k_policy: TruncationPolicy,
    q_policy: TruncationPolicy,
}

fn windows(cfg: &TorusConfig, n: usize, tol: f64) -> Result<KernelWindows> {
    let lb = cfg.magnetic_length();
    let l = cfg.length();
    let d = cfg.degeneracy() as f64;
    let prefactor = 1.0 / (norm_h_sq(n) * l * lb);
    let partner = hermite_sup_bound(n);
    let budget = (tol / 2.0).max(1e-300);
    let k_policy =
        TruncationPolicy::certify(n, lb, l / d, prefactor * partner, budget)?;
    let q_policy = TruncationPolicy::certify(n, lb, l, prefactor * partner, budget)?;
    Ok(KernelWindows { k_policy, q_policy })
}

/// Pointwise kernel `Pi_n(x, y)` with certified truncation.
pub fn kernel_value(
    cfg: &TorusConfig,
    n: usize,
    x: (f64, f64),
    y: (f64, f64),
    tol: f64,
) -> Result<Complex64> {
    let w = windows(cfg, n, tol)?;
    let l = cfg.length();
    let lb = cfg.magnetic_length();
    let d = cfg.degeneracy() as f64;
    let step = l / d;
    let inv_lb2 = cfg.inv_magnetic_length_sq();
    let two_pi = 2.0 * std::f64::consts::PI;

    let k_center = (-x.0 / step).round() as i64;
    let q_center = (-(y.0 - x.0) / l).round() as i64;
    let k_half = w.k_policy.half_width as i64;
    // The q window absorbs the spread of the first index.
    let q_half = w.q_policy.half_width as i64 + k_half / cfg.degeneracy() as i64 + 1;

    let mut acc = Complex64::new(0.0, 0.0);
    for k in (k_center - k_half)..=(k_center + k_half) {
        let u = (x.0 + k as f64 * step) / lb;
        let hu = hermite_function(n, u);
        if hu == 0.0 {
            continue;
        }
        for q in (q_center - q_half)..=(q_center + q_half) {
            let v = (y.0 + q as f64 * l + k as f64 * step) / lb;
            let hv = hermite_function(n, v);
            if hv == 0.0 {
                continue;
            }
            let angle = two_pi * (k as f64 * (y.1 - x.1) / l + d * q as f64 * y.1 / l);
            acc += hu * hv * Complex64::from_polar(1.0, angle);
        }
    }
    let gauge = Complex64::from_polar(1.0, (y.0 * y.1 - x.0 * x.1) * inv_lb2);
    Ok(gauge * acc / (norm_h_sq(n) * l * lb))
}

/// The real diagonal `Pi_n(z, z)` sampled on the grid, accumulated
/// separably per `q` ring: the `k` sums depend on `x` only and the phases
/// reduce to cosines in `y`.
pub fn diagonal_field(cfg: &TorusConfig, n: usize, grid: Grid, tol: f64) -> Result<RealField> {
    let w = windows(cfg, n, tol)?;
    let l = cfg.length();
    let lb = cfg.magnetic_length();
    let d = cfg.degeneracy() as f64;
    let step = l / d;
    let m = grid.size();
    let two_pi = 2.0 * std::f64::consts::PI;
    let cut = w.k_policy.scaled_cut;
    let delta = l / lb;
    let q_max = ((2.0 * cut / delta).floor() as i64 + 1).max(1);

    let k_half = w.k_policy.half_width as i64;
    let scale = 1.0 / (norm_h_sq(n) * l * lb);

    let mut field = RealField::zeros(grid);
    for q in 0..=q_max {
        // s_q(x) = sum_k h_n(u_k) h_n(u_k + q L / l_b).
        let profile: Vec<f64> = (0..m)
            .map(|i| {
                let x = i as f64 * grid.spacing();
                let center = (-x / step).round() as i64;
                let mut s = 0.0;
                for k in (center - k_half)..=(center + k_half) {
                    let u = (x + k as f64 * step) / lb;
                    s += hermite_function(n, u) * hermite_function(n, u + q as f64 * delta);
                }
                s
            })
            .collect();
        let weight = if q == 0 { 1.0 } else { 2.0 };
        for i in 0..m {
            if profile[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                let y = j as f64 * grid.spacing();
                let cosine = (two_pi * d * q as f64 * y / l).cos();
                field.values[(i, j)] += weight * profile[i] * cosine;
            }
        }
    }
    Ok(field.scaled(scale))
}

/// Diagonal of the magnetic-momentum-weighted kernel,
/// `(P_{hbar,b} Pi_n)(z, z)`, returned as the two vector components.
///
/// In Landau gauge the x component reduces to `i (hbar/l_b) h_n'(u_k)` per
/// summand and the y component to `b l_b u_k h_n(u_k)`, with the second
/// Hermite factor untouched.
pub fn momentum_diagonal_field(
    cfg: &TorusConfig,
    n: usize,
    grid: Grid,
    tol: f64,
) -> Result<(ComplexField, ComplexField)> {
    let w = windows(cfg, n, tol)?;
    let l = cfg.length();
    let lb = cfg.magnetic_length();
    let b = cfg.field_amplitude();
    let hbar = cfg.hbar();
    let d = cfg.degeneracy() as f64;
    let step = l / d;
    let m = grid.size();
    let two_pi = 2.0 * std::f64::consts::PI;
    let cut = w.k_policy.scaled_cut;
    let delta = l / lb;
    let q_max = ((2.0 * cut / delta).floor() as i64 + 1).max(1);
    let k_half = w.k_policy.half_width as i64 + 1;
    let scale = 1.0 / (norm_h_sq(n) * l * lb);

    let mut comp_x = ComplexField::zeros(grid);
    let mut comp_y = ComplexField::zeros(grid);
    for q in -q_max..=q_max {
        // Two x profiles per ring: h_n'(u) h_n(v) and u h_n(u) h_n(v).
        let mut profile_dx = vec![0.0f64; m];
        let mut profile_uy = vec![0.0f64; m];
        for i in 0..m {
            let x = i as f64 * grid.spacing();
            let center = (-x / step).round() as i64;
            let mut sdx = 0.0;
            let mut suy = 0.0;
            for k in (center - k_half)..=(center + k_half) {
                let u = (x + k as f64 * step) / lb;
                let gauss = (-u * u / 2.0).exp();
                let (h_prev, h_cur) = hermite_pair(n, u);
                // h_n'(u) = (2 n H_{n-1}(u) - u H_n(u)) e^{-u^2/2}.
                let h_deriv = (2.0 * n as f64 * h_prev - u * h_cur) * gauss;
                let h_val = h_cur * gauss;
                let partner = hermite_function(n, u + q as f64 * delta);
                sdx += h_deriv * partner;
                suy += u * h_val * partner;
            }
            profile_dx[i] = sdx;
            profile_uy[i] = suy;
        }
        for i in 0..m {
            for j in 0..m {
                let y = j as f64 * grid.spacing();
                let phase = Complex64::from_polar(1.0, two_pi * d * q as f64 * y / l);
                comp_x.values[(i, j)] += profile_dx[i] * phase;
                comp_y.values[(i, j)] += profile_uy[i] * phase;
            }
        }
    }
    let fx = comp_x.scaled(Complex64::new(0.0, hbar / lb * scale));
    let fy = comp_y.scaled(Complex64::new(b * lb * scale, 0.0));
    Ok((fx, fy))
}

/// Quadrature application of the kernel row at `x`:
/// `integral Pi_n(x, y) f(y) dy` over the grid samples. Slow; used as the
/// independent route against the orbital-sum projector.
pub fn apply_kernel_at(
    cfg: &TorusConfig,
    n: usize,
    x: (f64, f64),
    f: &ComplexField,
    tol: f64,
) -> Result<Complex64> {
    let m = f.grid.size();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        for j in 0..m {
            let y = f.grid.point(i, j);
            acc += kernel_value(cfg, n, x, y, tol)? * f.values[(i, j)];
        }
    }
    Ok(acc * f.grid.cell_area())
}
