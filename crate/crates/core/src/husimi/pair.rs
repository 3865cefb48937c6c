//! Two-body Husimi functions on a coarse phase-space grid.
//!
//! The order-2 symbol lives on the square of the truncated phase space; a
//! full-resolution product grid is out of reach, so the position slots are
//! sampled on a strided sub-grid with matching quadrature weights.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::OrbitalSet;
use crate::error::{Error, Result};
use crate::husimi::symbols::DensityMatrix;
use crate::model::{convolve_complex, Grid};
use crate::projector::Localizer;

/// A two-body phase-space density sampled at coarse centers.
#[derive(Clone, Debug)]
pub struct PairPhaseSpaceDensity {
    pub grid: Grid,
    pub stride: usize,
    pub levels: usize,
    /// Coarse cell centers, row-major over the strided sub-grid.
    pub centers: Vec<(usize, usize)>,
    /// `m2[(n1, c1), (n2, c2)]`, row-major with slot index `n * nc + c`.
    pub values: Vec<f64>,
}

impl PairPhaseSpaceDensity {
    pub fn slot_count(&self) -> usize {
        self.levels * self.centers.len()
    }

    pub fn value(&self, n1: usize, c1: usize, n2: usize, c2: usize) -> f64 {
        let nc = self.centers.len();
        let i = n1 * nc + c1;
        let j = n2 * nc + c2;
        self.values[i * self.slot_count() + j]
    }

    /// Coarse quadrature weight per position slot.
    pub fn cell_weight(&self) -> f64 {
        let h = self.grid.spacing() * self.stride as f64;
        h * h
    }

    /// Integral against the squared phase-space measure on the coarse grid.
    pub fn eta_integral(&self) -> f64 {
        let w = self.cell_weight();
        self.values.iter().sum::<f64>() * w * w
    }

    /// `max |m2(X1, X2) - m2(X2, X1)|`.
    pub fn symmetry_deviation(&self) -> f64 {
        let s = self.slot_count();
        let mut worst = 0.0f64;
        for i in 0..s {
            for j in 0..s {
                worst = worst.max((self.values[i * s + j] - self.values[j * s + i]).abs());
            }
        }
        worst
    }

    /// Integrates out the second slot; returns per-(level, center) values.
    pub fn first_marginal(&self) -> Vec<f64> {
        let s = self.slot_count();
        let w = self.cell_weight();
        (0..s)
            .map(|i| (0..s).map(|j| self.values[i * s + j]).sum::<f64>() * w)
            .collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}

/// Computes the two-body lower symbol
/// `m2(X1, X2) = Tr[gamma_2 (Pi_{X1} (x) Pi_{X2})]` at the coarse centers.
pub fn pair_lower_symbol(
    set: &OrbitalSet,
    localizer: &Localizer,
    gamma2: &DensityMatrix,
    n_cut: usize,
    stride: usize,
) -> Result<PairPhaseSpaceDensity> {
    if gamma2.body != 2 {
        return Err(Error::Precondition("expected a two-body density matrix".into()));
    }
    let count = set.orbital_count();
    if gamma2.matrix.nrows() != count * count {
        return Err(Error::Precondition(format!(
            "two-body matrix dimension {} does not match M^2 = {}",
            gamma2.matrix.nrows(),
            count * count
        )));
    }
    let grid = set.grid();
    if stride == 0 || grid.size() % stride != 0 {
        return Err(Error::Precondition(format!(
            "stride {stride} must divide the grid size {}",
            grid.size()
        )));
    }
    let d = set.config().degeneracy();
    let levels = n_cut + 1;
    let g = localizer.samples.to_complex();

    let coarse = grid.size() / stride;
    let centers: Vec<(usize, usize)> = (0..coarse)
        .flat_map(|i| (0..coarse).map(move |j| (i * stride, j * stride)))
        .collect();
    let nc = centers.len();

    // Localized projector matrices P^{(n, c)}_{e a} = sum_l conj(S_{nl,e}) S_{nl,a}
    // with S_{nl,a}(R) = <g_R psi_{nl}, psi_a> read off at the coarse centers.
    let mut projectors: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); count * count]; levels * nc];
    for n in 0..levels {
        for l in 0..d {
            let probe = set.orbital(n, l);
            let s_fields: Vec<Vec<Complex64>> = (0..count)
                .into_par_iter()
                .map(|a| {
                    let pair = probe.conj_mul(set.orbital_flat(a)).expect("same grid");
                    let conv = convolve_complex(&g, &pair).expect("same grid");
                    centers.iter().map(|&(i, j)| conv.values[(i, j)]).collect()
                })
                .collect();
            for (c, _) in centers.iter().enumerate() {
                let target = &mut projectors[n * nc + c];
                for e in 0..count {
                    let se = s_fields[e][c].conj();
                    for a in 0..count {
                        target[e * count + a] += se * s_fields[a][c];
                    }
                }
            }
        }
    }

    let slots = levels * nc;
    let values: Vec<f64> = (0..slots)
        .into_par_iter()
        .flat_map_iter(|x1| {
            let p1 = &projectors[x1];
            // Partial contraction T_{b d} = sum_{a c} gamma2[(ab),(cd)] P1_{c a}.
            let mut partial = vec![Complex64::default(); count * count];
            for a in 0..count {
                for b in 0..count {
                    let row = a * count + b;
                    for c in 0..count {
                        let p1ca = p1[c * count + a];
                        if p1ca.norm_sqr() == 0.0 {
                            continue;
                        }
                        for dd in 0..count {
                            partial[b * count + dd] +=
                                gamma2.matrix[(row, c * count + dd)] * p1ca;
                        }
                    }
                }
            }
            (0..slots)
                .map(|x2| {
                    let p2 = &projectors[x2];
                    let mut acc = Complex64::default();
                    for b in 0..count {
                        for dd in 0..count {
                            acc += partial[b * count + dd] * p2[dd * count + b];
                        }
                    }
                    acc.re
                })
                .collect::<Vec<f64>>()
        })
        .collect();

    Ok(PairPhaseSpaceDensity { grid, stride, levels, centers, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use crate::model::TorusConfig;

    #[test]
    fn product_state_pair_symbol_factorizes() {
        // gamma2 = gamma (x) gamma for a pure orbital state: the pair symbol
        // is the product of the one-body symbols.
        let cfg = TorusConfig::new(1.0, 3, 1.0, 0, 2).unwrap();
        let grid = Grid::new(64, 1.0).unwrap();
        let set = crate::basis::OrbitalSet::build(&cfg, 1, grid, 1e-13).unwrap();
        let count = set.orbital_count();
        let mut one = DMatrix::<Complex64>::zeros(count, count);
        one[(0, 0)] = Complex64::new(1.0, 0.0);
        let mut two = DMatrix::<Complex64>::zeros(count * count, count * count);
        // (gamma (x) gamma)[(ab),(cd)] = gamma_ac gamma_bd, only (00),(00).
        two[(0, 0)] = Complex64::new(1.0, 0.0);
        let loc = Localizer::build(1.5, grid).unwrap();

        let pair = pair_lower_symbol(&set, &loc, &DensityMatrix::two_body(two), 1, 8).unwrap();
        assert!(pair.min_value() >= -1e-12, "positivity");
        assert!(pair.symmetry_deviation() <= 1e-10, "exchange symmetry of the product");

        // Factorization at a few centers against the one-body transform.
        let transform =
            crate::husimi::HusimiTransform::new(&set, Some(1.5), 1, 1e-12).unwrap();
        let (m1, _) = transform
            .lower_symbol(&DensityMatrix::one_body(one))
            .unwrap();
        for &(ci, cj) in pair.centers.iter().take(5) {
            let c = pair
                .centers
                .iter()
                .position(|&p| p == (ci, cj))
                .unwrap();
            for n1 in 0..2 {
                for n2 in 0..2 {
                    let lhs = pair.value(n1, c, n2, c);
                    let rhs = m1.slice(n1).values[(ci, cj)] * m1.slice(n2).values[(ci, cj)];
                    assert!(
                        (lhs - rhs).abs() <= 1e-10,
                        "factorization at ({n1}, {n2}): {lhs} vs {rhs}"
                    );
                }
            }
        }
    }
}
