//! Landau-level projectors: integral kernel, diagonal, localized versions.
//!
//! The projector on level `n` has the lattice-sum kernel obtained from the
//! Poisson-resummed eigenfunctions after summing out the slot index; set on
//! the diagonal it converges uniformly to the whole-plane constant
//! `1/(2 pi l_b^2)` at rate `l_b`, which the convergence study measures.
//! Localized (coherent) projectors sandwich the kernel between translated
//! copies of the smooth bump.

mod kernel;
mod localized;
mod study;

pub use kernel::{
    apply_kernel_at, diagonal_field, kernel_value, momentum_diagonal_field, norm_h_sq,
};
pub use localized::{
    localized_trace_field, resolution_of_identity_residual, LocalizedProjector, Localizer,
};
pub use study::{hermite_reference_integral, kernel_convergence_study, log_log_slope, StudyRow};

use crate::model::{ComplexField, TorusConfig};

/// Full projector on level `n` applied through the sampled orbitals:
/// `Pi_n f = sum_l psi_{nl} <psi_{nl}, f>`.
pub fn apply_projector(
    set: &crate::basis::OrbitalSet,
    level: usize,
    f: &ComplexField,
) -> crate::error::Result<ComplexField> {
    let d = set.config().degeneracy();
    let mut out = ComplexField::zeros(f.grid);
    for l in 0..d {
        let orbital = set.orbital(level, l);
        let overlap = orbital.inner(f)?;
        out = out.add(&orbital.scaled(overlap))?;
    }
    Ok(out)
}

/// Default localizer scale, `lambda = d^{1/4}`; slow growth keeps the
/// kinetic localization error `hbar b lambda l_b` small along the sweeps.
pub fn default_lambda(cfg: &TorusConfig) -> f64 {
    (cfg.degeneracy() as f64).powf(0.25)
}
