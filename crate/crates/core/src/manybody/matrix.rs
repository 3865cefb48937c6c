//! Orbital matrix elements of the potential and the interaction.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::OrbitalSet;
use crate::error::{Error, Result};
use crate::model::{fft2, RealField};

/// `<psi_a | V | psi_b>` by grid quadrature, Hermitized with the measured
/// deviation asserted below 1e-10.
pub fn one_body_matrix(potential: &RealField, set: &OrbitalSet) -> Result<DMatrix<Complex64>> {
    let count = set.orbital_count();
    let entries: Vec<((usize, usize), Complex64)> = (0..count)
        .flat_map(|a| (a..count).map(move |b| (a, b)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(a, b)| {
            let weighted = set
                .orbital_flat(b)
                .mul_real(potential)
                .expect("orbitals share the grid");
            let v = set.orbital_flat(a).inner(&weighted).expect("same grid");
            ((a, b), v)
        })
        .collect();
    let mut matrix = DMatrix::<Complex64>::zeros(count, count);
    for ((a, b), v) in entries {
        matrix[(a, b)] = v;
        if a != b {
            matrix[(b, a)] = v.conj();
        }
    }
    // The quadrature of conj(psi_a) V psi_b already produces the conjugate
    // of the (b, a) entry, so only the diagonal can drift: force it real
    // and record the correction.
    let mut correction = 0.0f64;
    for a in 0..count {
        correction = correction.max(matrix[(a, a)].im.abs());
        matrix[(a, a)] = Complex64::new(matrix[(a, a)].re, 0.0);
    }
    if correction > 1e-10 {
        return Err(Error::Validation(format!(
            "one-body matrix Hermiticity correction {correction} too large"
        )));
    }
    Ok(matrix)
}

/// The two-body tensor `W[a, b, c, d] = <ab| w |cd>` contracted in Fourier
/// space: `sum_G c_G conj(T_{ca}(G)) T_{bd}(G)` with
/// `T_{ac}(G) = integral conj(psi_a) psi_c e^{-i G x}`.
pub struct TwoBodyTensor {
    pub dim: usize,
    values: Vec<Complex64>,
    /// Max Hermiticity deviation `|W[abcd] - conj(W[cdab])|` before
    /// symmetrization.
    pub hermiticity_deviation: f64,
    /// Max particle-exchange deviation `|W[abcd] - W[badc]|`.
    pub exchange_deviation: f64,
}

impl TwoBodyTensor {
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        self.values[((a * self.dim + b) * self.dim + c) * self.dim + d]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }
}

pub fn two_body_tensor(interaction: &RealField, set: &OrbitalSet) -> Result<TwoBodyTensor> {
    let count = set.orbital_count();
    if count > 40 {
        return Err(Error::Budget(format!(
            "two-body tensor over {count} orbitals exceeds the dense budget"
        )));
    }
    let grid = set.grid();
    let m = grid.size();
    let area = grid.cell_area();

    // Fourier modes of the interaction with non-negligible weight.
    let spectrum = fft2(&interaction.to_complex().values);
    let norm = 1.0 / (m * m) as f64;
    let mut modes: Vec<(usize, usize, Complex64)> = Vec::new();
    let mut max_coeff = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            max_coeff = max_coeff.max(spectrum[(i, j)].norm() * norm);
        }
    }
    let threshold = 1e-15 * max_coeff.max(1e-300);
    for i in 0..m {
        for j in 0..m {
            let c = spectrum[(i, j)] * norm;
            if c.norm() > threshold {
                modes.push((i, j, c));
            }
        }
    }

    // Pair transforms at the retained modes: T[a][c][g].
    let pair_transforms: Vec<Vec<Complex64>> = (0..count * count)
        .into_par_iter()
        .map(|ac| {
            let a = ac / count;
            let c = ac % count;
            let pair = set
                .orbital_flat(a)
                .conj_mul(set.orbital_flat(c))
                .expect("same grid");
            let hat = fft2(&pair.values);
            modes.iter().map(|&(i, j, _)| hat[(i, j)] * area).collect()
        })
        .collect();

    let transforms = &pair_transforms;
    let mode_list = &modes;
    let values: Vec<Complex64> = (0..count * count)
        .into_par_iter()
        .flat_map_iter(|ab| {
            let a = ab / count;
            let b = ab % count;
            (0..count * count).map(move |cd| {
                let c = cd / count;
                let d = cd % count;
                let t_ca = &transforms[c * count + a];
                let t_bd = &transforms[b * count + d];
                let mut acc = Complex64::default();
                for (g, &(_, _, coeff)) in mode_list.iter().enumerate() {
                    acc += coeff * t_ca[g].conj() * t_bd[g];
                }
                acc
            })
        })
        .collect();

    let mut tensor = TwoBodyTensor {
        dim: count,
        values,
        hermiticity_deviation: 0.0,
        exchange_deviation: 0.0,
    };

    // Measure and enforce Hermiticity W[abcd] = conj(W[cdab]).
    let mut herm = 0.0f64;
    let mut exch = 0.0f64;
    for a in 0..count {
        for b in 0..count {
            for c in 0..count {
                for d in 0..count {
                    let w = tensor.get(a, b, c, d);
                    herm = herm.max((w - tensor.get(c, d, a, b).conj()).norm());
                    exch = exch.max((w - tensor.get(b, a, d, c)).norm());
                }
            }
        }
    }
    let scale = tensor.max_abs().max(1e-300);
    if herm > 1e-10 * scale.max(1.0) {
        return Err(Error::Validation(format!(
            "two-body tensor Hermiticity deviation {herm}"
        )));
    }
    for a in 0..count {
        for b in 0..count {
            for c in 0..count {
                for d in 0..count {
                    let idx = ((a * count + b) * count + c) * count + d;
                    let sym = 0.5 * (tensor.values[idx] + tensor.get(c, d, a, b).conj());
                    tensor.values[idx] = sym;
                }
            }
        }
    }
    tensor.hermiticity_deviation = herm;
    tensor.exchange_deviation = exch;
    Ok(tensor)
}
