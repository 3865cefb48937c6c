//! Localized (coherent) projectors `Pi_{n,R} = g_R Pi_n g_R`.


use crate::basis::OrbitalSet;
use crate::error::{Error, Result};
use crate::model::{convolve_complex, convolve_real, Bump, ComplexField, Grid, RealField};

/// The smooth localizer at scale `lambda`: samples of `g_lambda` and
/// `g_lambda^2` plus the gradient norm entering the kinetic identity.
#[derive(Clone, Debug)]
pub struct Localizer {
    pub lambda: f64,
    /// `g_lambda`, unit L^2 norm on the grid.
    pub samples: RealField,
    /// `g_lambda^2`, unit mass on the grid.
    pub squared: RealField,
    /// `||grad g_lambda||^2 = lambda^2 ||grad g||^2`, by radial quadrature.
    pub grad_l2_sq: f64,
    support_radius: f64,
}

impl Localizer {
    pub fn build(lambda: f64, grid: Grid) -> Result<Self> {
        if lambda < 1.0 {
            return Err(Error::Precondition(format!("lambda must be >= 1, got {lambda}")));
        }
        let bump = Bump::new(grid.length());
        let support_radius = bump.support_radius(lambda);
        if support_radius < 8.0 * grid.spacing() {
            return Err(Error::Precondition(format!(
                "localizer support radius {support_radius} is under-resolved \
                 (needs >= 8 cells, spacing {})",
                grid.spacing()
            )));
        }
        let samples = bump.sample_scaled(lambda, grid);
        let squared = samples.mul(&samples)?;
        Ok(Self {
            lambda,
            samples,
            squared,
            grad_l2_sq: lambda * lambda * bump.grad_l2_sq(),
            support_radius,
        })
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// `g_lambda(. - R)` for a grid-point center, by index roll.
    pub fn translated(&self, center: (usize, usize)) -> RealField {
        let m = self.samples.grid.size();
        let mut out = RealField::zeros(self.samples.grid);
        for i in 0..m {
            for j in 0..m {
                out.values[(i, j)] = self.samples.values[(
                    (i + m - center.0) % m,
                    (j + m - center.1) % m,
                )];
            }
        }
        out
    }
}

/// `Pi_{n,R}` as a rank-(at most d) positive operator represented through
/// the level-n orbitals.
pub struct LocalizedProjector<'a> {
    set: &'a OrbitalSet,
    level: usize,
    window: RealField,
}

impl<'a> LocalizedProjector<'a> {
    pub fn new(set: &'a OrbitalSet, level: usize, loc: &Localizer, center: (usize, usize)) -> Self {
        Self { set, level, window: loc.translated(center) }
    }

    /// Applies `g_R Pi_n g_R` to a field.
    pub fn apply(&self, f: &ComplexField) -> Result<ComplexField> {
        let d = self.set.config().degeneracy();
        let windowed = f.mul_real(&self.window)?;
        let mut out = ComplexField::zeros(f.grid);
        for l in 0..d {
            let orbital = self.set.orbital(self.level, l);
            let overlap = orbital.inner(&windowed)?;
            out = out.add(&orbital.scaled(overlap))?;
        }
        out.mul_real(&self.window)
    }

    /// `<f, Pi_{n,R} f>`, non-negative for the sandwiched positive operator.
    pub fn rayleigh(&self, f: &ComplexField) -> Result<f64> {
        let applied = self.apply(f)?;
        Ok(f.inner(&applied)?.re)
    }
}

/// `R -> Tr[Pi_{n,R}]` over the whole grid in one convolution:
/// the trace equals `(g_lambda^2 * Pi_n(z,z))(R)`.
pub fn localized_trace_field(
    diag: &RealField,
    loc: &Localizer,
) -> Result<RealField> {
    convolve_real(&loc.squared, diag)
}

/// Applies the truncated resolution of identity
/// `sum_{n <= n_max} integral Pi_{n,R} dR` to `f` and reports the residual
/// against `f` together with the certified leakage bound
/// `sqrt(<f, (Id - sum) f>)` coming from levels above the cut.
pub fn resolution_of_identity_residual(
    set: &OrbitalSet,
    loc: &Localizer,
    f: &ComplexField,
) -> Result<(f64, f64)> {
    let g = loc.samples.to_complex();
    let mut reconstructed = ComplexField::zeros(f.grid);
    let mut captured = 0.0;
    for a in 0..set.orbital_count() {
        let orbital = set.orbital_flat(a);
        let pair = orbital.conj_mul(f)?;
        // C(R) = <g_R psi, f> = (g * conj(psi) f)(R) for the even bump.
        let coefficient = convolve_complex(&g, &pair)?;
        captured += coefficient.abs_sq().integrate();
        let spread = convolve_complex(&g, &coefficient)?;
        let mut term = orbital.clone();
        term.values.zip_mut_with(&spread.values, |o, s| *o *= s);
        reconstructed = reconstructed.add(&term)?;
    }
    let residual = reconstructed.sub(f)?.l2_norm();
    let leakage = (f.l2_norm().powi(2) - captured).max(0.0).sqrt();
    Ok((residual, leakage))
}
