//! Phase-space densities: lower symbols (Husimi functions), upper-symbol
//! reconstruction, the saturated density of the filled-level ansatz, the
//! semi-classical energy functional and the trace-restoring mass correction.
//!
//! The phase space is the truncated ladder of Landau levels crossed with
//! the spatial grid; the measure is the counting measure in the level index
//! times the Lebesgue measure in position.

mod pair;
mod symbols;

pub use pair::{pair_lower_symbol, PairPhaseSpaceDensity};
pub use symbols::{DensityMatrix, HusimiTransform, KineticTraceReport};

use crate::error::{Error, Result};
use crate::model::{convolve_real, Grid, RealField, TorusConfig};
use crate::projector::{diagonal_field, localized_trace_field, Localizer};

/// A non-negative density on the truncated phase space, one spatial slice
/// per Landau level.
#[derive(Clone, Debug)]
pub struct PhaseSpaceDensity {
    pub grid: Grid,
    pub slices: Vec<RealField>,
}

impl PhaseSpaceDensity {
    pub fn zeros(grid: Grid, levels: usize) -> Self {
        Self { grid, slices: (0..levels).map(|_| RealField::zeros(grid)).collect() }
    }

    /// Number of stored levels (`n_max + 1`).
    pub fn level_count(&self) -> usize {
        self.slices.len()
    }

    pub fn slice(&self, n: usize) -> &RealField {
        &self.slices[n]
    }

    /// Integral against the phase-space measure: sum over levels of the
    /// spatial quadrature.
    pub fn eta_integral(&self) -> f64 {
        self.slices.iter().map(|s| s.integrate()).sum()
    }

    /// Mass per level.
    pub fn level_masses(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.integrate()).collect()
    }

    /// The spatial density `rho_m = sum_n m(n, .)`.
    pub fn spatial_density(&self) -> RealField {
        let mut rho = RealField::zeros(self.grid);
        for s in &self.slices {
            rho = rho.add(s).expect("slices share the grid");
        }
        rho
    }

    pub fn max_value(&self) -> f64 {
        self.slices.iter().fold(f64::NEG_INFINITY, |m, s| m.max(s.max_value()))
    }

    pub fn min_value(&self) -> f64 {
        self.slices.iter().fold(f64::INFINITY, |m, s| m.min(s.min_value()))
    }
}

/// The saturated phase-space density of a partial-level profile: the `q`
/// lowest levels filled at the Pauli ceiling, level `q` carrying `rho`,
/// all higher levels empty.
pub fn build_saturated_density(
    rho: &RealField,
    cfg: &TorusConfig,
) -> Result<PhaseSpaceDensity> {
    let q = cfg.filled_levels();
    let cap = cfg.density_cap();
    let mass = cfg.partial_mass();
    let tol = 1e-10 * cap.max(1.0);
    if rho.min_value() < -tol || rho.max_value() > cap + tol {
        return Err(Error::Precondition(format!(
            "partial-level density violates the ceiling: range [{}, {}], cap {cap}",
            rho.min_value(),
            rho.max_value()
        )));
    }
    let total = rho.integrate();
    if (total - mass).abs() > 1e-10 * mass.max(1.0) {
        return Err(Error::Precondition(format!(
            "partial-level mass {total} does not match r/(q+r) = {mass}"
        )));
    }
    let mut slices = Vec::with_capacity(q + 1);
    for _ in 0..q {
        slices.push(RealField::constant(rho.grid, cap));
    }
    slices.push(rho.clone());
    Ok(PhaseSpaceDensity { grid: rho.grid, slices })
}

/// The semi-classical energy of a one-body phase-space density with the
/// interaction evaluated on the product `m (x) m`:
/// kinetic level sum + external potential + two-body convolution term.
pub fn semiclassical_energy(
    m: &PhaseSpaceDensity,
    potential: &RealField,
    interaction: &RealField,
    cfg: &TorusConfig,
) -> Result<f64> {
    let mut kinetic = 0.0;
    for (n, slice) in m.slices.iter().enumerate() {
        kinetic += cfg.level_energy(n) * slice.integrate();
    }
    let rho = m.spatial_density();
    let external = potential.inner(&rho)?;
    let smeared = convolve_real(interaction, &rho)?;
    let pair = rho.inner(&smeared)?;
    Ok(kinetic + external + pair)
}

/// Orbital-free Husimi machinery: the localizer together with the exact
/// level trace fields `t_n(R) = Tr[Pi_{n,R}]`, which the trace functional
/// and the mass correction consume.
pub struct HusimiMap {
    cfg: TorusConfig,
    grid: Grid,
    pub localizer: Localizer,
    trace_fields: Vec<RealField>,
    tol: f64,
}

impl HusimiMap {
    pub fn new(cfg: &TorusConfig, grid: Grid, lambda: f64, levels: usize, tol: f64) -> Result<Self> {
        let localizer = Localizer::build(lambda, grid)?;
        let mut map = Self { cfg: *cfg, grid, localizer, trace_fields: Vec::new(), tol };
        map.extend_trace_fields(levels)?;
        Ok(map)
    }

    fn extend_trace_fields(&mut self, levels: usize) -> Result<()> {
        while self.trace_fields.len() < levels {
            let n = self.trace_fields.len();
            let diag = diagonal_field(&self.cfg, n, self.grid, self.tol)?;
            self.trace_fields.push(localized_trace_field(&diag, &self.localizer)?);
        }
        Ok(())
    }

    pub fn config(&self) -> &TorusConfig {
        &self.cfg
    }

    /// `t_n(R) = Tr[Pi_{n,R}]`, computed on demand beyond the cache.
    pub fn trace_field(&mut self, n: usize) -> Result<&RealField> {
        self.extend_trace_fields(n + 1)?;
        Ok(&self.trace_fields[n])
    }

    /// The exact operator trace of the upper-symbol matrix,
    /// `Tr[gamma_m] = 2 pi l_b^2 sum_n integral m(n, R) t_n(R) dR`.
    pub fn operator_trace(&mut self, m: &PhaseSpaceDensity) -> Result<f64> {
        self.extend_trace_fields(m.level_count())?;
        let mut acc = 0.0;
        for (n, slice) in m.slices.iter().enumerate() {
            acc += slice.inner(&self.trace_fields[n])?;
        }
        Ok(2.0 * std::f64::consts::PI * self.cfg.magnetic_length_sq() * acc)
    }

    /// Restores unit operator trace by moving mass capped at the Pauli
    /// ceiling: a deficit adds `min(tau, cap - m)` on the low levels, a
    /// surplus subtracts `min(m, tau)` everywhere; `tau` is found by
    /// bisection. Returns the corrected density and the sup-norm of the
    /// change.
    pub fn mass_correct(&mut self, m: &PhaseSpaceDensity) -> Result<(PhaseSpaceDensity, f64)> {
        let cfg = self.cfg;
        let cap = cfg.phase_space_cap();
        if m.min_value() < -1e-12 * cap || m.max_value() > cap * (1.0 + 1e-9) {
            return Err(Error::Precondition(format!(
                "phase-space density violates the Pauli ceiling {cap}: range [{}, {}]",
                m.min_value(),
                m.max_value()
            )));
        }
        let base = self.operator_trace(m)?;
        if (base - 1.0).abs() <= 1e-13 {
            return Ok((m.clone(), 0.0));
        }

        // Smallest fill index whose saturated capacity exceeds one particle
        // worth of trace: n1 = floor(N/d) + 1; mass moves on levels <= n1.
        let fill_levels = cfg.particles() / cfg.degeneracy() + 1;
        let levels = m.level_count().max(fill_levels + 1);
        self.extend_trace_fields(levels)?;

        let deficit = base < 1.0;
        let corrected = |tau: f64| -> PhaseSpaceDensity {
            let mut out = PhaseSpaceDensity::zeros(m.grid, levels);
            for n in 0..levels {
                let source = m.slices.get(n);
                for (idx, v) in out.slices[n].values.iter_mut().enumerate() {
                    let base_v = source.map_or(0.0, |s| {
                        s.values.as_slice().expect("standard layout")[idx]
                    });
                    *v = if deficit {
                        if n <= fill_levels {
                            (base_v + tau).min(cap)
                        } else {
                            base_v
                        }
                    } else {
                        (base_v - tau).max(0.0)
                    };
                }
            }
            out
        };
        let trace_of = |map: &mut HusimiMap, tau: f64| -> Result<f64> {
            let c = corrected(tau);
            map.operator_trace(&c)
        };

        let mut lo = 0.0f64;
        let mut hi = cap;
        let t_hi = trace_of(self, hi)?;
        if deficit && t_hi < 1.0 {
            return Err(Error::Validation(format!(
                "mass correction cannot reach unit trace: capacity {t_hi} at full cap"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let t = trace_of(self, mid)?;
            let over = if deficit { t > 1.0 } else { t < 1.0 };
            if over {
                hi = mid;
            } else {
                lo = mid;
            }
            if (t - 1.0).abs() <= 1e-13 {
                break;
            }
        }
        let tau = 0.5 * (lo + hi);
        let out = corrected(tau);
        let trace = self.operator_trace(&out)?;
        if (trace - 1.0).abs() > 1e-12 {
            return Err(Error::NonConverged(format!(
                "mass-correction bisection left |trace - 1| = {}",
                (trace - 1.0).abs()
            )));
        }
        let mut sup_change = 0.0f64;
        for n in 0..levels {
            let after = out.slices[n].values.as_slice().expect("standard layout");
            match m.slices.get(n) {
                Some(s) => {
                    for (a, b) in after.iter().zip(s.values.as_slice().unwrap()) {
                        sup_change = sup_change.max((a - b).abs());
                    }
                }
                None => {
                    for a in after {
                        sup_change = sup_change.max(a.abs());
                    }
                }
            }
        }
        Ok((out, sup_change))
    }
}
