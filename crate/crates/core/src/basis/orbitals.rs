//! Grid-sampled orbital sets with validation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::ladder::{apply_ladder_field, LadderKind};
use crate::basis::series::{
    eigenfunction_with_policy, lattice_step, prefactor_magnitude, EvalMethod, TruncationPolicy,
};
use crate::basis::{direct_constant, hermite::hermite_function, poisson_constant, OrbitalIndex};
use crate::error::{Error, Result};
use crate::model::{ComplexField, Grid, TorusConfig};

/// Samples `psi_{nl}` on the grid through the defining series, accumulating
/// one separable (x-phase) x (y-profile) term per lattice index.
pub fn sample_orbital(
    cfg: &TorusConfig,
    idx: OrbitalIndex,
    grid: Grid,
    tol: f64,
) -> Result<ComplexField> {
    idx.check(cfg)?;
    let policy = TruncationPolicy::certify(
        idx.level,
        cfg.magnetic_length(),
        lattice_step(cfg, EvalMethod::Direct),
        prefactor_magnitude(cfg, idx.level, EvalMethod::Direct),
        tol,
    )?;
    let l = cfg.length();
    let lb = cfg.magnetic_length();
    let d = cfg.degeneracy() as f64;
    let slot = idx.slot as f64;
    let n = idx.level;
    let two_pi = 2.0 * std::f64::consts::PI;
    let m = grid.size();
    let mut field = ComplexField::zeros(grid);
    let cut = policy.scaled_cut * lb;
    let k_lo = ((-cut - slot * l / d) / l).floor() as i64 - 1;
    let k_hi = ((cut + l - slot * l / d) / l).ceil() as i64 + 1;
    for k in k_lo..=k_hi {
        let angle_rate = two_pi * (slot + k as f64 * d) / l;
        let x_phase: Vec<Complex64> = (0..m)
            .map(|i| Complex64::from_polar(1.0, angle_rate * (i as f64 * grid.spacing())))
            .collect();
        let y_profile: Vec<f64> = (0..m)
            .map(|j| {
                let u = (j as f64 * grid.spacing() + slot * l / d + k as f64 * l) / lb;
                hermite_function(n, u)
            })
            .collect();
        for i in 0..m {
            for j in 0..m {
                field.values[(i, j)] += x_phase[i] * y_profile[j];
            }
        }
    }
    Ok(field.scaled(direct_constant(n) / (l * lb).sqrt()))
}

/// Grid sampling through the Poisson-resummed series; the independent
/// second route.
pub fn sample_orbital_poisson(
    cfg: &TorusConfig,
    idx: OrbitalIndex,
    grid: Grid,
    tol: f64,
) -> Result<ComplexField> {
    idx.check(cfg)?;
    let policy = TruncationPolicy::certify(
        idx.level,
        cfg.magnetic_length(),
        lattice_step(cfg, EvalMethod::Poisson),
        prefactor_magnitude(cfg, idx.level, EvalMethod::Poisson),
        tol,
    )?;
    let l = cfg.length();
    let lb = cfg.magnetic_length();
    let d = cfg.degeneracy() as f64;
    let step = l / d;
    let slot = idx.slot as f64;
    let n = idx.level;
    let two_pi = 2.0 * std::f64::consts::PI;
    let m = grid.size();
    let mut field = ComplexField::zeros(grid);
    let cut = policy.scaled_cut * lb;
    let k_lo = ((-cut - l) / step).floor() as i64 - 1;
    let k_hi = (cut / step).ceil() as i64 + 1;
    for k in k_lo..=k_hi {
        let x_profile: Vec<f64> = (0..m)
            .map(|i| {
                let v = (i as f64 * grid.spacing() + k as f64 * step) / lb;
                hermite_function(n, v)
            })
            .collect();
        let y_phase: Vec<Complex64> = (0..m)
            .map(|j| {
                let angle =
                    -two_pi * k as f64 * ((j as f64 * grid.spacing()) / l + slot / d);
                Complex64::from_polar(1.0, angle)
            })
            .collect();
        for i in 0..m {
            for j in 0..m {
                field.values[(i, j)] += x_profile[i] * y_phase[j];
            }
        }
    }
    // Global gauge phase e^{-i x y / l_b^2}.
    let inv_lb2 = cfg.inv_magnetic_length_sq();
    for i in 0..m {
        let x = i as f64 * grid.spacing();
        for j in 0..m {
            let y = j as f64 * grid.spacing();
            field.values[(i, j)] *= Complex64::from_polar(1.0, -x * y * inv_lb2);
        }
    }
    Ok(field.scaled(poisson_constant(n) * lb.sqrt() / l.powf(1.5)))
}

/// Tolerances applied by orbital-set validation.
#[derive(Clone, Copy, Debug)]
pub struct ValidationThresholds {
    pub gram: f64,
    pub boundary: f64,
    pub ladder: f64,
    pub kinetic_relative: f64,
}

impl Default for ValidationThresholds {
    fn default() -> Self {
        Self { gram: 1e-8, boundary: 1e-10, ladder: 1e-8, kinetic_relative: 1e-8 }
    }
}

/// Measured validation diagnostics of a built orbital set.
#[derive(Clone, Copy, Debug, Default)]
pub struct ValidationReport {
    /// `max |Gram - Id|` over the grid quadrature.
    pub gram_deviation: f64,
    /// Magnetic-periodic boundary residual at edge samples.
    pub boundary_residual: f64,
    /// `sup |a^dag psi_{nl} - sqrt(n+1) psi_{n+1,l}|` over the grid.
    pub ladder_residual: f64,
    /// `sup |a psi_{0l}|` over the grid.
    pub lll_annihilation_residual: f64,
    /// Worst relative error of `2 hbar b (||a psi||^2 + 1/2)` against `E_n`.
    pub kinetic_relative_error: f64,
    /// Certified truncation tail of the sampling series.
    pub certified_tail: f64,
}

/// All orbitals of levels `0..=n_max` sampled on one grid, validated at
/// build time. Downstream modules consume these samples and never re-derive
/// the series.
pub struct OrbitalSet {
    config: TorusConfig,
    grid: Grid,
    n_max: usize,
    orbitals: Vec<ComplexField>,
    policy: TruncationPolicy,
    report: ValidationReport,
}

impl OrbitalSet {
    /// Builds and validates with default thresholds.
    pub fn build(cfg: &TorusConfig, n_max: usize, grid: Grid, tol: f64) -> Result<Self> {
        Self::build_with(cfg, n_max, grid, tol, ValidationThresholds::default())
    }

    pub fn build_with(
        cfg: &TorusConfig,
        n_max: usize,
        grid: Grid,
        tol: f64,
        thresholds: ValidationThresholds,
    ) -> Result<Self> {
        if n_max > crate::basis::MAX_LEVEL {
            return Err(Error::Precondition(format!(
                "n_max = {n_max} exceeds the supported maximum {}",
                crate::basis::MAX_LEVEL
            )));
        }
        let d = cfg.degeneracy();
        let count = (n_max + 1) * d;
        let orbitals: Vec<ComplexField> = (0..count)
            .into_par_iter()
            .map(|a| sample_orbital(cfg, OrbitalIndex::new(a / d, a % d), grid, tol))
            .collect::<Result<_>>()?;
        let policy = TruncationPolicy::certify(
            n_max,
            cfg.magnetic_length(),
            lattice_step(cfg, EvalMethod::Direct),
            prefactor_magnitude(cfg, n_max, EvalMethod::Direct),
            tol,
        )?;
        let mut set = Self {
            config: *cfg,
            grid,
            n_max,
            orbitals,
            policy,
            report: ValidationReport { certified_tail: policy.tail_bound, ..Default::default() },
        };
        set.validate(tol, thresholds)?;
        Ok(set)
    }

    fn validate(&mut self, tol: f64, thresholds: ValidationThresholds) -> Result<()> {
        let cfg = &self.config;
        let d = cfg.degeneracy();

        // Orthonormality through the grid quadrature.
        let count = self.orbitals.len();
        let pairs: Vec<(usize, usize)> = (0..count)
            .flat_map(|a| (a..count).map(move |b| (a, b)))
            .collect();
        let gram_deviation = pairs
            .par_iter()
            .map(|&(a, b)| {
                let g = self.orbitals[a]
                    .inner(&self.orbitals[b])
                    .expect("orbitals share the build grid");
                let expected = if a == b { 1.0 } else { 0.0 };
                (g - expected).norm()
            })
            .reduce(|| 0.0, f64::max);
        if gram_deviation > thresholds.gram {
            return Err(Error::Validation(format!(
                "orbital Gram deviates from identity by {gram_deviation} \
                 (threshold {})",
                thresholds.gram
            )));
        }

        // Magnetic-periodic boundary residuals at edge samples.
        let l = cfg.length();
        let mut boundary: f64 = 0.0;
        for a in 0..count {
            let idx = OrbitalIndex::new(a / d, a % d);
            for s in 0..16 {
                let t = s as f64 * l / 16.0;
                let right = eigenfunction_with_policy(
                    cfg,
                    idx,
                    (l, t),
                    EvalMethod::Direct,
                    &self.policy,
                );
                let left = eigenfunction_with_policy(
                    cfg,
                    idx,
                    (0.0, t),
                    EvalMethod::Direct,
                    &self.policy,
                );
                boundary = boundary.max((right - left).norm());
                let top = eigenfunction_with_policy(
                    cfg,
                    idx,
                    (t, l),
                    EvalMethod::Direct,
                    &self.policy,
                );
                let phase =
                    Complex64::from_polar(1.0, -l * t * cfg.inv_magnetic_length_sq());
                let bottom = eigenfunction_with_policy(
                    cfg,
                    idx,
                    (t, 0.0),
                    EvalMethod::Direct,
                    &self.policy,
                );
                boundary = boundary.max((top - phase * bottom).norm());
            }
        }
        if boundary > thresholds.boundary {
            return Err(Error::Validation(format!(
                "boundary residual {boundary} exceeds {}",
                thresholds.boundary
            )));
        }

        // Ladder identities and kinetic eigenvalues through the algebraic
        // route L = 2 hbar b (a^dag a + 1/2).
        let mut ladder: f64 = 0.0;
        let mut annihilation: f64 = 0.0;
        let mut kinetic: f64 = 0.0;
        let hbar_b = cfg.hbar() * cfg.field_amplitude();
        for a in 0..count {
            let n = a / d;
            let slot = a % d;
            let idx = OrbitalIndex::new(n, slot);
            let lowered = apply_ladder_field(cfg, idx, self.grid, LadderKind::Lower, tol)?;
            if n == 0 {
                annihilation = annihilation.max(lowered.sup_norm());
            }
            if n < self.n_max {
                let raised = apply_ladder_field(cfg, idx, self.grid, LadderKind::Raise, tol)?;
                let target = self.orbitals[(n + 1) * d + slot]
                    .scaled(Complex64::new(((n + 1) as f64).sqrt(), 0.0));
                ladder = ladder.max(raised.sub(&target)?.sup_norm());
            }
            let excitation = lowered.l2_norm().powi(2);
            let norm_sq = self.orbitals[a].l2_norm().powi(2);
            let energy = 2.0 * hbar_b * (excitation + 0.5 * norm_sq);
            let expected = cfg.level_energy(n);
            kinetic = kinetic.max((energy - expected).abs() / expected);
        }
        if ladder > thresholds.ladder || annihilation > thresholds.ladder {
            return Err(Error::Validation(format!(
                "ladder residuals {ladder} / {annihilation} exceed {}",
                thresholds.ladder
            )));
        }
        if kinetic > thresholds.kinetic_relative {
            return Err(Error::Validation(format!(
                "kinetic eigenvalue relative error {kinetic} exceeds {}",
                thresholds.kinetic_relative
            )));
        }

        self.report = ValidationReport {
            gram_deviation,
            boundary_residual: boundary,
            ladder_residual: ladder,
            lll_annihilation_residual: annihilation,
            kinetic_relative_error: kinetic,
            certified_tail: self.policy.tail_bound,
        };
        Ok(())
    }

    pub fn config(&self) -> &TorusConfig {
        &self.config
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Flat orbital count `(n_max + 1) d`.
    pub fn orbital_count(&self) -> usize {
        self.orbitals.len()
    }

    /// Canonical flat index `n d + l`.
    pub fn flat_index(&self, n: usize, l: usize) -> usize {
        n * self.config.degeneracy() + l
    }

    pub fn level_of(&self, flat: usize) -> usize {
        flat / self.config.degeneracy()
    }

    pub fn slot_of(&self, flat: usize) -> usize {
        flat % self.config.degeneracy()
    }

    pub fn orbital(&self, n: usize, l: usize) -> &ComplexField {
        &self.orbitals[self.flat_index(n, l)]
    }

    pub fn orbital_flat(&self, flat: usize) -> &ComplexField {
        &self.orbitals[flat]
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    /// Kinetic energy of each flat orbital index, `E_{n(a)}`.
    pub fn level_energies(&self) -> Vec<f64> {
        (0..self.orbital_count())
            .map(|a| self.config.level_energy(self.level_of(a)))
            .collect()
    }
}
