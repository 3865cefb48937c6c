//! Lower and upper symbols of one-body density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::OrbitalSet;
use crate::error::{Error, Result};
use crate::husimi::{HusimiMap, PhaseSpaceDensity};
use crate::model::{convolve_complex, convolve_real, ComplexField, RealField};

/// A density matrix expressed on the orbital basis (`body = 1`, dimension
/// `M`) or on the ordered-pair basis (`body = 2`, dimension `M^2` with pair
/// `(a, b)` flattened to `a M + b`).
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub matrix: DMatrix<Complex64>,
    pub body: usize,
}

impl DensityMatrix {
    pub fn one_body(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix, body: 1 }
    }

    pub fn two_body(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix, body: 2 }
    }

    pub fn trace(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.matrix.nrows() {
            acc += self.matrix[(i, i)];
        }
        acc
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.matrix.nrows() {
            for j in i..self.matrix.ncols() {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian eigendecomposition (eigenvalues ascending is not
    /// guaranteed by nalgebra; callers treat them as an unordered set).
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let sym = nalgebra::SymmetricEigen::new(self.matrix.clone());
        (sym.eigenvalues.iter().copied().collect(), sym.eigenvectors)
    }
}

/// Diagnostics of the kinetic trace identity: the algebraic trace equals the
/// truncated phase-space kinetic sum, minus the localizer gradient
/// correction, up to the energy carried by levels above the cut.
#[derive(Clone, Copy, Debug)]
pub struct KineticTraceReport {
    /// `Tr[L gamma]` evaluated algebraically on the eigenbasis.
    pub algebraic: f64,
    /// `sum_{n <= cut} E_n integral m(n, R) dR`.
    pub husimi_kinetic: f64,
    /// `(hbar lambda)^2 ||grad g||^2 Tr[gamma]`.
    pub gradient_correction: f64,
    /// Energy beyond the cut: `algebraic + correction - husimi_kinetic`.
    pub energy_leakage: f64,
    /// Phase-space mass beyond the cut.
    pub mass_leakage: f64,
}

/// Husimi transform bound to an orbital set: lower symbols with exact
/// leakage accounting and upper-symbol reconstruction.
pub struct HusimiTransform<'a> {
    set: &'a OrbitalSet,
    pub map: HusimiMap,
    n_cut: usize,
}

impl<'a> HusimiTransform<'a> {
    /// `lambda = None` uses the default scale `d^{1/4}`.
    pub fn new(set: &'a OrbitalSet, lambda: Option<f64>, n_cut: usize, tol: f64) -> Result<Self> {
        let cfg = set.config();
        let lambda = lambda.unwrap_or_else(|| crate::projector::default_lambda(cfg));
        let map = HusimiMap::new(cfg, set.grid(), lambda, n_cut + 1, tol)?;
        Ok(Self { set, map, n_cut })
    }

    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    pub fn set(&self) -> &OrbitalSet {
        self.set
    }

    fn check_one_body(&self, gamma: &DensityMatrix) -> Result<()> {
        if gamma.body != 1 {
            return Err(Error::Precondition("expected a one-body density matrix".into()));
        }
        if gamma.matrix.nrows() != self.set.orbital_count() {
            return Err(Error::Precondition(format!(
                "matrix dimension {} does not match the orbital count {}",
                gamma.matrix.nrows(),
                self.set.orbital_count()
            )));
        }
        Ok(())
    }

    /// Eigen-pairs of a positive one-body matrix, negatives clipped at the
    /// documented threshold.
    fn positive_eigenpairs(
        &self,
        gamma: &DensityMatrix,
    ) -> Result<Vec<(f64, Vec<Complex64>)>> {
        let scale = gamma.trace().re.abs().max(1.0);
        let (values, vectors) = gamma.eigen();
        let mut pairs = Vec::new();
        for (j, &w) in values.iter().enumerate() {
            if w < -1e-10 * scale {
                return Err(Error::Precondition(format!(
                    "density matrix has a negative eigenvalue {w}"
                )));
            }
            let w = w.max(0.0);
            if w > 1e-15 * scale {
                pairs.push((w, vectors.column(j).iter().copied().collect()));
            }
        }
        Ok(pairs)
    }

    /// Combines orbital coefficients into a sampled field.
    fn assemble_field(&self, coefficients: &[Complex64]) -> ComplexField {
        let mut field = ComplexField::zeros(self.set.grid());
        for (a, c) in coefficients.iter().enumerate() {
            if c.norm_sqr() > 0.0 {
                field = field
                    .add(&self.set.orbital_flat(a).scaled(*c))
                    .expect("orbitals share the grid");
            }
        }
        field
    }

    /// The lower symbol `m(n, R) = Tr[gamma Pi_{n,R}]` on levels `<= n_cut`,
    /// together with the exact leakage field: the part of
    /// `(g^2 * rho_gamma)(R)` carried by levels above the cut, so that
    /// `sum_n m(n, R) + leak(R) = (g^2 * rho_gamma)(R)` identically.
    pub fn lower_symbol(
        &self,
        gamma: &DensityMatrix,
    ) -> Result<(PhaseSpaceDensity, RealField)> {
        self.check_one_body(gamma)?;
        let grid = self.set.grid();
        let pairs = self.positive_eigenpairs(gamma)?;
        let g = self.map.localizer.samples.to_complex();
        let g_sq = &self.map.localizer.squared;
        let d = self.set.config().degeneracy();

        let mut density = PhaseSpaceDensity::zeros(grid, self.n_cut + 1);
        let mut leak = RealField::zeros(grid);
        for (weight, coeffs) in &pairs {
            let phi = self.assemble_field(coeffs);
            let full = convolve_real(g_sq, &phi.abs_sq())?;
            let mut captured = RealField::zeros(grid);
            for n in 0..=self.n_cut {
                let contributions: Vec<RealField> = (0..d)
                    .into_par_iter()
                    .map(|l| {
                        let pair = self
                            .set
                            .orbital(n, l)
                            .conj_mul(&phi)
                            .expect("same grid");
                        let coeff = convolve_complex(&g, &pair).expect("same grid");
                        coeff.abs_sq()
                    })
                    .collect();
                for c in contributions {
                    density.slices[n] = density.slices[n].add(&c.scaled(*weight))?;
                    captured = captured.add(&c)?;
                }
            }
            leak = leak.add(&full.sub(&captured)?.scaled(*weight))?;
        }
        Ok((density, leak))
    }

    /// The upper-symbol matrix `gamma_m = 2 pi l_b^2 integral m(X) Pi_X`,
    /// assembled on the orbital basis.
    pub fn upper_symbol(&self, m: &PhaseSpaceDensity) -> Result<DensityMatrix> {
        if m.min_value() < -1e-12 * m.max_value().abs().max(1e-300) {
            return Err(Error::Precondition(format!(
                "upper symbol requires a non-negative density, min {}",
                m.min_value()
            )));
        }
        if m.level_count() > self.set.n_max() + 1 {
            return Err(Error::Precondition(format!(
                "upper symbol needs sampled orbitals for {} levels, basis has {}",
                m.level_count(),
                self.set.n_max() + 1
            )));
        }
        let count = self.set.orbital_count();
        let d = self.set.config().degeneracy();
        let g = self.map.localizer.samples.to_complex();
        let mut matrix = DMatrix::<Complex64>::zeros(count, count);
        for (n, slice) in m.slices.iter().enumerate() {
            for l in 0..d {
                let probe = self.set.orbital(n, l);
                // S_a(R) = <g_R psi_{nl}, psi_a>.
                let fields: Vec<ComplexField> = (0..count)
                    .into_par_iter()
                    .map(|a| {
                        let pair = probe
                            .conj_mul(self.set.orbital_flat(a))
                            .expect("same grid");
                        convolve_complex(&g, &pair).expect("same grid")
                    })
                    .collect();
                let updates: Vec<(usize, usize, Complex64)> = (0..count)
                    .flat_map(|a| (a..count).map(move |b| (a, b)))
                    .collect::<Vec<_>>()
                    .into_par_iter()
                    .map(|(a, b)| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        let sa = fields[a].flat();
                        let sb = fields[b].flat();
                        let w = slice.values.as_slice().expect("standard layout");
                        for i in 0..sa.len() {
                            acc += w[i] * sa[i].conj() * sb[i];
                        }
                        (a, b, acc * slice.grid.cell_area())
                    })
                    .collect();
                for (a, b, v) in updates {
                    matrix[(a, b)] += v;
                    if a != b {
                        matrix[(b, a)] += v.conj();
                    }
                }
            }
        }
        let lb2 = self.set.config().magnetic_length_sq();
        matrix *= Complex64::new(2.0 * std::f64::consts::PI * lb2, 0.0);
        Ok(DensityMatrix::one_body(matrix))
    }

    /// The kinetic trace identity with measured leakage.
    pub fn kinetic_trace(&mut self, gamma: &DensityMatrix) -> Result<KineticTraceReport> {
        self.check_one_body(gamma)?;
        let cfg = *self.set.config();
        let mut algebraic = 0.0;
        for a in 0..self.set.orbital_count() {
            algebraic += cfg.level_energy(self.set.level_of(a)) * gamma.matrix[(a, a)].re;
        }
        let (m, leak) = self.lower_symbol(gamma)?;
        let mut husimi_kinetic = 0.0;
        for (n, mass) in m.level_masses().iter().enumerate() {
            husimi_kinetic += cfg.level_energy(n) * mass;
        }
        let gradient_correction = cfg.hbar() * cfg.hbar()
            * self.map.localizer.grad_l2_sq
            * gamma.trace().re;
        let energy_leakage = algebraic + gradient_correction - husimi_kinetic;
        Ok(KineticTraceReport {
            algebraic,
            husimi_kinetic,
            gradient_correction,
            energy_leakage,
            mass_leakage: leak.integrate(),
        })
    }
}
