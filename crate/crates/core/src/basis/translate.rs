//! Magnetic translation operators in Landau gauge.
//!
//! `tau_{z0} f = e^{i phi_{z0}} f(. - z0)` with `phi_{z0}(x) = -y0 x / l_b^2`.
//! For grid-multiple displacements the translation is an exact index roll;
//! off-grid displacements need the interpolation flag and go through Fourier
//! shifts (along y via the periodicizing phase, along x directly).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{fft_axis, ComplexField, TorusConfig};

/// Applies the magnetic translation by `z0 = (x0, y0)`.
///
/// Without `interpolate`, `z0` must be a grid multiple (to within
/// `1e-9` cells); with it, spectral interpolation evaluates the
/// magnetic-periodic continuation at the shifted points.
pub fn magnetic_translate(
    f: &ComplexField,
    z0: (f64, f64),
    cfg: &TorusConfig,
    interpolate: bool,
) -> Result<ComplexField> {
    let grid = f.grid;
    let m = grid.size();
    let h = grid.spacing();
    let sx = z0.0 / h;
    let sy = z0.1 / h;
    let on_grid = (sx - sx.round()).abs() <= 1e-9 && (sy - sy.round()).abs() <= 1e-9;

    let shifted = if on_grid {
        // f(x - x0, y - y0) with the magnetic-periodic continuation: each
        // wrap of the y argument across a period picks up the Bloch phase
        // e^{-i w L x / l_b^2}; the x direction is plainly periodic.
        let ix = sx.round() as i64;
        let iy = sy.round() as i64;
        let inv_lb2 = cfg.inv_magnetic_length_sq();
        let l = cfg.length();
        let mut out = ComplexField::zeros(grid);
        for i in 0..m {
            let x = i as f64 * h;
            let src_i = (i as i64 - ix).rem_euclid(m as i64) as usize;
            for j in 0..m {
                let raw_j = j as i64 - iy;
                let src_j = raw_j.rem_euclid(m as i64) as usize;
                let wraps = (raw_j - src_j as i64) / m as i64;
                let phase = Complex64::from_polar(1.0, -(wraps as f64) * l * x * inv_lb2);
                out.values[(i, j)] = phase * f.values[(src_i, src_j)];
            }
        }
        out
    } else if !interpolate {
        return Err(Error::Precondition(format!(
            "translation ({}, {}) is off-grid and interpolation was not requested",
            z0.0, z0.1
        )));
    } else {
        fourier_shift(f, z0, cfg)
    };

    // Landau-gauge phase phi = -y0 x / l_b^2.
    let inv_lb2 = cfg.inv_magnetic_length_sq();
    let mut out = shifted;
    for i in 0..m {
        let x = i as f64 * h;
        let phase = Complex64::from_polar(1.0, -z0.1 * x * inv_lb2);
        for j in 0..m {
            out.values[(i, j)] *= phase;
        }
    }
    Ok(out)
}

/// Off-grid shift of a magnetic-periodic field. The y shift acts on the
/// y-periodic transform `chi = e^{i x y / l_b^2} f`; the x shift acts on the
/// x-periodic result directly.
fn fourier_shift(f: &ComplexField, z0: (f64, f64), cfg: &TorusConfig) -> ComplexField {
    let grid = f.grid;
    let m = grid.size();
    let h = grid.spacing();
    let inv_lb2 = cfg.inv_magnetic_length_sq();

    // y shift through chi.
    let mut chi = f.values.clone();
    for i in 0..m {
        let x = i as f64 * h;
        for j in 0..m {
            let y = j as f64 * h;
            chi[(i, j)] *= Complex64::from_polar(1.0, x * y * inv_lb2);
        }
    }
    fft_axis(&mut chi, 1, false);
    for j in 0..m {
        let factor = Complex64::from_polar(1.0, -grid.wavenumber(j) * z0.1);
        for i in 0..m {
            chi[(i, j)] *= factor;
        }
    }
    fft_axis(&mut chi, 1, true);
    // Undo the periodicizing phase at the shifted y argument.
    for i in 0..m {
        let x = i as f64 * h;
        for j in 0..m {
            let y = j as f64 * h;
            chi[(i, j)] *= Complex64::from_polar(1.0, -x * (y - z0.1) * inv_lb2);
        }
    }

    // x shift on the x-periodic intermediate.
    fft_axis(&mut chi, 0, false);
    for i in 0..m {
        let factor = Complex64::from_polar(1.0, -grid.wavenumber(i) * z0.0);
        for j in 0..m {
            chi[(i, j)] *= factor;
        }
    }
    fft_axis(&mut chi, 0, true);

    ComplexField { grid, values: chi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::orbitals::sample_orbital;
    use crate::basis::OrbitalIndex;
    use crate::model::Grid;

    #[test]
    fn zero_translation_is_the_identity() {
        let cfg = TorusConfig::basis_only(1.0, 4, 1.0).unwrap();
        let grid = Grid::new(64, 1.0).unwrap();
        let psi = sample_orbital(&cfg, OrbitalIndex::new(1, 1), grid, 1e-13).unwrap();
        let out = magnetic_translate(&psi, (0.0, 0.0), &cfg, false).unwrap();
        assert_eq!(out.sub(&psi).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn slot_orbitals_are_generated_by_sublattice_translations() {
        // psi_{0l} = (tau_{-i L/d})^l psi_{00}.
        let cfg = TorusConfig::basis_only(1.0, 4, 1.0).unwrap();
        let grid = Grid::new(128, 1.0).unwrap();
        let step = (0.0, -cfg.length() / cfg.degeneracy() as f64);
        let mut state = sample_orbital(&cfg, OrbitalIndex::new(0, 0), grid, 1e-14).unwrap();
        for l in 1..cfg.degeneracy() {
            state = magnetic_translate(&state, step, &cfg, false).unwrap();
            let expected = sample_orbital(&cfg, OrbitalIndex::new(0, l), grid, 1e-14).unwrap();
            let diff = state.sub(&expected).unwrap().sup_norm();
            assert!(diff <= 1e-8, "slot {l}: residual {diff}");
        }
    }

    #[test]
    fn full_period_translations_commute_at_quantized_flux() {
        let cfg = TorusConfig::basis_only(1.0, 4, 1.0).unwrap();
        let grid = Grid::new(64, 1.0).unwrap();
        let psi = sample_orbital(&cfg, OrbitalIndex::new(1, 2), grid, 1e-13).unwrap();
        let l = cfg.length();
        let a = magnetic_translate(
            &magnetic_translate(&psi, (l, 0.0), &cfg, false).unwrap(),
            (0.0, l),
            &cfg,
            false,
        )
        .unwrap();
        let b = magnetic_translate(
            &magnetic_translate(&psi, (0.0, l), &cfg, false).unwrap(),
            (l, 0.0),
            &cfg,
            false,
        )
        .unwrap();
        let diff = a.sub(&b).unwrap().sup_norm();
        assert!(diff <= 1e-12, "commutator residual {diff}");
        // Both equal the original field: tau_L = tau_{iL} = Id on the
        // magnetic-periodic space.
        let fixed = a.sub(&psi).unwrap().sup_norm();
        assert!(fixed <= 1e-12, "tau_L tau_iL psi != psi: {fixed}");
    }

    #[test]
    fn off_grid_translation_requires_the_interpolation_flag() {
        let cfg = TorusConfig::basis_only(1.0, 4, 1.0).unwrap();
        let grid = Grid::new(64, 1.0).unwrap();
        let psi = sample_orbital(&cfg, OrbitalIndex::new(0, 0), grid, 1e-13).unwrap();
        let off = (0.37 * grid.spacing(), 0.0);
        assert!(magnetic_translate(&psi, off, &cfg, false).is_err());
        assert!(magnetic_translate(&psi, off, &cfg, true).is_ok());
    }

    #[test]
    fn interpolated_translation_matches_pointwise_series() {
        // Translate by an off-grid displacement and compare with the series
        // evaluated at the shifted points (with the gauge phase).
        use crate::basis::series::{eigenfunction, EvalMethod};
        let cfg = TorusConfig::basis_only(1.0, 4, 1.0).unwrap();
        let grid = Grid::new(128, 1.0).unwrap();
        let idx = OrbitalIndex::new(1, 1);
        let psi = sample_orbital(&cfg, idx, grid, 1e-14).unwrap();
        let z0 = (0.123, -0.456);
        let translated = magnetic_translate(&psi, z0, &cfg, true).unwrap();
        let inv_lb2 = cfg.inv_magnetic_length_sq();
        let mut worst = 0.0f64;
        for i in (0..grid.size()).step_by(17) {
            for j in (0..grid.size()).step_by(13) {
                let (x, y) = grid.point(i, j);
                let phase = Complex64::from_polar(1.0, -z0.1 * x * inv_lb2);
                let expected = phase
                    * eigenfunction(&cfg, idx, (x - z0.0, y - z0.1), EvalMethod::Direct, 1e-14)
                        .unwrap();
                worst = worst.max((translated.values[(i, j)] - expected).norm());
            }
        }
        assert!(worst <= 1e-9, "interpolated translation residual {worst}");
    }
}
