//! Torus configuration with exact flux quantization.

use crate::error::{Error, Result};

/// Physical parameters of the magnetic torus.
///
/// The inputs are the side length `L`, the Landau degeneracy `d`, Planck's
/// parameter `hbar`, the number of fully filled levels `q` and the particle
/// count `N`. The field amplitude `b`, the magnetic length `l_b` and the
/// partial filling `r` are *derived*, which makes the flux quantization
/// `b L^2 = 2 pi d hbar` and the filling `N/d = q + r` exact at finite size
/// instead of asymptotic.
#[derive(Clone, Copy, Debug)]
pub struct TorusConfig {
    length: f64,
    degeneracy: usize,
    hbar: f64,
    filled_levels: usize,
    particles: usize,
    field_amplitude: f64,
    magnetic_length_sq: f64,
    magnetic_length: f64,
    filling_ratio: f64,
}

impl TorusConfig {
    /// Builds a configuration, deriving `b = 2 pi d hbar / L^2`,
    /// `l_b = sqrt(hbar / b)` and `r = N/d - q`.
    ///
    /// Rejects non-positive inputs and any filling with `N/d - q`
    /// outside `[0, 1)`.
    pub fn new(
        length: f64,
        degeneracy: usize,
        hbar: f64,
        filled_levels: usize,
        particles: usize,
    ) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("torus side must be positive, got {length}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Config(format!("hbar must be positive, got {hbar}")));
        }
        if degeneracy == 0 {
            return Err(Error::Config("degeneracy d must be at least 1".into()));
        }
        if particles == 0 {
            return Err(Error::Config("particle count N must be at least 1".into()));
        }
        let filling_ratio = particles as f64 / degeneracy as f64 - filled_levels as f64;
        if !(0.0..1.0).contains(&filling_ratio) {
            return Err(Error::Config(format!(
                "filling N/d - q = {filling_ratio} must lie in [0, 1); \
                 got N = {particles}, d = {degeneracy}, q = {filled_levels}"
            )));
        }
        let field_amplitude = 2.0 * std::f64::consts::PI * degeneracy as f64 * hbar
            / (length * length);
        let magnetic_length_sq = hbar / field_amplitude;
        Ok(Self {
            length,
            degeneracy,
            hbar,
            filled_levels,
            particles,
            field_amplitude,
            magnetic_length_sq,
            magnetic_length: magnetic_length_sq.sqrt(),
            filling_ratio,
        })
    }

    /// Configuration for basis work only, where the filling is irrelevant
    /// (`q = 0`, one particle).
    pub fn basis_only(length: f64, degeneracy: usize, hbar: f64) -> Result<Self> {
        Self::new(length, degeneracy, hbar, 0, 1)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Landau-level degeneracy `d`, equal to the number of flux quanta.
    pub fn degeneracy(&self) -> usize {
        self.degeneracy
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Number of fully filled Landau levels `q`.
    pub fn filled_levels(&self) -> usize {
        self.filled_levels
    }

    /// Particle count `N`.
    pub fn particles(&self) -> usize {
        self.particles
    }

    /// Magnetic field amplitude `b = 2 pi d hbar / L^2`.
    pub fn field_amplitude(&self) -> f64 {
        self.field_amplitude
    }

    /// Magnetic length `l_b = sqrt(hbar/b)`.
    pub fn magnetic_length(&self) -> f64 {
        self.magnetic_length
    }

    /// `l_b^2 = hbar / b`, stored exactly as the quotient.
    pub fn magnetic_length_sq(&self) -> f64 {
        self.magnetic_length_sq
    }

    /// `1 / l_b^2 = b / hbar`, used by the gauge phases.
    pub fn inv_magnetic_length_sq(&self) -> f64 {
        self.field_amplitude / self.hbar
    }

    /// Filling ratio `r = N/d - q` of the partially filled level.
    pub fn filling_ratio(&self) -> f64 {
        self.filling_ratio
    }

    /// Total filling `q + r = N/d`, exact as a single quotient.
    pub fn total_filling(&self) -> f64 {
        self.particles as f64 / self.degeneracy as f64
    }

    /// Energy of the n-th Landau level, `E_n = 2 hbar b (n + 1/2)`.
    pub fn level_energy(&self, n: usize) -> f64 {
        2.0 * self.hbar * self.field_amplitude * (n as f64 + 0.5)
    }

    /// Target mass of the partial-level density, `r/(q+r) = (N - q d)/N`,
    /// evaluated through the integer form.
    pub fn partial_mass(&self) -> f64 {
        (self.particles as i64 - (self.filled_levels * self.degeneracy) as i64) as f64
            / self.particles as f64
    }

    /// Pointwise ceiling of the partial-level density,
    /// `1/((q+r) L^2) = d/(N L^2)`, evaluated through the integer form.
    pub fn density_cap(&self) -> f64 {
        self.degeneracy as f64 / (self.particles as f64 * self.length * self.length)
    }

    /// Pauli ceiling on one-body phase-space densities, `1/(2 pi l_b^2 N)`.
    /// Through the flux relation this equals `d / (N L^2)`.
    pub fn phase_space_cap(&self) -> f64 {
        self.density_cap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derived_quantities_are_bit_exact() {
        let cfg = TorusConfig::new(1.0, 4, 1.0, 1, 6).unwrap();
        // Derived, not validated: the stored values are bitwise equal to the
        // defining expressions.
        assert_eq!(cfg.field_amplitude(), 2.0 * PI * 4.0 * 1.0 / 1.0);
        assert_eq!(cfg.field_amplitude(), 8.0 * PI);
        assert_eq!(cfg.magnetic_length_sq(), 1.0 / (8.0 * PI));
        assert_eq!(cfg.magnetic_length(), (1.0 / (8.0 * PI)).sqrt());
        assert_eq!(cfg.filling_ratio(), 0.5);
        // Degeneracy relation d = L^2/(2 pi l_b^2).
        let d_back = cfg.length().powi(2)
            / (2.0 * PI * cfg.magnetic_length_sq());
        assert!((d_back - 4.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_filling_and_rejections() {
        let cfg = TorusConfig::new(1.0, 4, 1.0, 1, 4).unwrap();
        assert_eq!(cfg.filling_ratio(), 0.0);
        assert!(TorusConfig::new(1.0, 4, 1.0, 1, 8).is_err(), "r = 1 is out of range");
        assert!(TorusConfig::new(1.0, 4, 1.0, 2, 4).is_err(), "r < 0 is out of range");
        assert!(TorusConfig::new(-1.0, 4, 1.0, 0, 1).is_err());
        assert!(TorusConfig::new(1.0, 0, 1.0, 0, 1).is_err());
        assert!(TorusConfig::new(1.0, 4, 0.0, 0, 1).is_err());
        assert!(TorusConfig::new(1.0, 4, 1.0, 0, 0).is_err());
    }

    #[test]
    fn level_energies_and_exact_rationals() {
        let cfg = TorusConfig::new(1.0, 4, 1.0, 1, 6).unwrap();
        let hb = cfg.hbar() * cfg.field_amplitude();
        assert_eq!(cfg.level_energy(0), hb);
        assert_eq!(cfg.level_energy(1), 3.0 * hb);
        // r/(q+r) = (6-4)/6 = 1/3 and cap = 4/6 = 2/3 on the unit torus.
        assert!((cfg.partial_mass() - 1.0 / 3.0).abs() < 1e-16);
        assert!((cfg.density_cap() - 2.0 / 3.0).abs() < 1e-16);
    }
}
