//! Eigenbasis of the magnetic Laplacian on the torus, in Landau gauge.
//!
//! The basis `psi_{nl}` (level `n`, intra-level slot `l = 0..d-1`) is built
//! from two independent analytic lattice series: the defining sum over the
//! period lattice and its Poisson resummation. Both carry certified
//! truncation tails, and agreement of the two routes is one of the standing
//! validation checks. Ladder operators act on the series term by term in
//! closed form, and a spectral route applies them to arbitrary sampled
//! magnetic-periodic fields.

mod hermite;
mod ladder;
mod orbitals;
mod series;
mod theta;
mod translate;

pub use hermite::{
    hermite_coeff_abs_sum, hermite_function, hermite_pair, hermite_polynomial, MAX_LEVEL,
};
pub use ladder::{apply_ladder, apply_ladder_field, apply_ladder_spectral, LadderKind};
pub use orbitals::{
    sample_orbital, sample_orbital_poisson, OrbitalSet, ValidationReport, ValidationThresholds,
};
pub use series::{eigenfunction, eigenfunction_with_policy, EvalMethod, TruncationPolicy};
pub use theta::theta;
pub use translate::magnetic_translate;

use crate::error::{Error, Result};
use crate::model::TorusConfig;

/// Index of one orbital: Landau level `level` and intra-level slot `slot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitalIndex {
    pub level: usize,
    pub slot: usize,
}

impl OrbitalIndex {
    pub fn new(level: usize, slot: usize) -> Self {
        Self { level, slot }
    }

    pub fn check(&self, cfg: &TorusConfig) -> Result<()> {
        if self.slot >= cfg.degeneracy() {
            return Err(Error::Precondition(format!(
                "slot {} out of range for degeneracy {}",
                self.slot,
                cfg.degeneracy()
            )));
        }
        if self.level > MAX_LEVEL {
            return Err(Error::Precondition(format!(
                "level {} exceeds the supported maximum {MAX_LEVEL}",
                self.level
            )));
        }
        Ok(())
    }
}

/// Normalization constant of the defining series,
/// `c_n = (-i/sqrt(2))^n / (pi^{1/4} sqrt(n!))`.
pub fn direct_constant(n: usize) -> num_complex::Complex64 {
    let base = num_complex::Complex64::new(0.0, -1.0) / 2.0f64.sqrt();
    base.powu(n as u32) / (std::f64::consts::PI.powf(0.25) * factorial(n).sqrt())
}

/// Normalization constant of the Poisson-resummed series,
/// `c~_n = pi^{1/4} 2^{(1-n)/2} / sqrt(n!)`. The parity flip of the
/// resummation index cancels the `(-1)^n` of the raw resummation, so the
/// constant is positive for every level.
pub fn poisson_constant(n: usize) -> num_complex::Complex64 {
    num_complex::Complex64::new(
        std::f64::consts::PI.powf(0.25) * 2.0f64.powf((1.0 - n as f64) / 2.0)
            / factorial(n).sqrt(),
        0.0,
    )
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
