//! Reduced density matrices, Hartree-Fock energies and the Wick check.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manybody::fock::{annihilate, create, FockVector, SlaterBasis};
use crate::manybody::matrix::TwoBodyTensor;

const CHUNKS: usize = 64;

/// `gamma^{(1)}_{ab} = <c+_b c_a> / N`, trace one.
pub fn reduced_density_one(state: &FockVector) -> DMatrix<Complex64> {
    let basis = &state.basis;
    let m = basis.orbital_count;
    let n = basis.particle_count as f64;
    let dim = basis.dimension();
    let chunk = dim.div_ceil(CHUNKS);
    let partials: Vec<DMatrix<Complex64>> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut acc = DMatrix::<Complex64>::zeros(m, m);
            let lo = c * chunk;
            let hi = ((c + 1) * chunk).min(dim);
            for j in lo..hi {
                let vj = state.coefficients[j];
                if vj.norm_sqr() == 0.0 {
                    continue;
                }
                let mask = basis.mask(j);
                for a in 0..m {
                    let Some((m1, s1)) = annihilate(mask, a) else { continue };
                    for b in 0..m {
                        let Some((m2, s2)) = create(m1, b) else { continue };
                        let Some(i) = basis.index_of(m2) else { continue };
                        let vi = state.coefficients[i];
                        acc[(a, b)] += vi.conj() * (s1 * s2) * vj;
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = DMatrix::<Complex64>::zeros(m, m);
    for p in partials {
        total += p;
    }
    total / Complex64::new(n, 0.0)
}

/// `Gamma_{(ab),(cd)} = <c+_c c+_d c_b c_a> / (N (N-1))` on the ordered-pair
/// basis `(a, b) -> a M + b`; trace one.
pub fn reduced_density_two(state: &FockVector) -> DMatrix<Complex64> {
    let basis = &state.basis;
    let m = basis.orbital_count;
    let n = basis.particle_count as f64;
    let dim = basis.dimension();
    let chunk = dim.div_ceil(CHUNKS);
    let partials: Vec<DMatrix<Complex64>> = (0..CHUNKS)
        .into_par_iter()
        .map(|cidx| {
            let mut acc = DMatrix::<Complex64>::zeros(m * m, m * m);
            let lo = cidx * chunk;
            let hi = ((cidx + 1) * chunk).min(dim);
            for j in lo..hi {
                let vj = state.coefficients[j];
                if vj.norm_sqr() == 0.0 {
                    continue;
                }
                let mask = basis.mask(j);
                for a in 0..m {
                    let Some((m1, s1)) = annihilate(mask, a) else { continue };
                    for b in 0..m {
                        let Some((m2, s2)) = annihilate(m1, b) else { continue };
                        for d in 0..m {
                            let Some((m3, s3)) = create(m2, d) else { continue };
                            for c in 0..m {
                                let Some((m4, s4)) = create(m3, c) else { continue };
                                let Some(i) = basis.index_of(m4) else { continue };
                                let vi = state.coefficients[i];
                                acc[(a * m + b, c * m + d)] +=
                                    vi.conj() * (s1 * s2 * s3 * s4) * vj;
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = DMatrix::<Complex64>::zeros(m * m, m * m);
    for p in partials {
        total += p;
    }
    total / Complex64::new(n * (n - 1.0), 0.0)
}

/// Partial trace of a two-body matrix over the second slot.
pub fn partial_trace_two(gamma2: &DMatrix<Complex64>, m: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::zeros(m, m);
    for a in 0..m {
        for c in 0..m {
            let mut acc = Complex64::default();
            for b in 0..m {
                acc += gamma2[(a * m + b, c * m + b)];
            }
            out[(a, c)] = acc;
        }
    }
    out
}

/// `Tr[(Id (x) A) Ex gamma^{(x)2}]` through the identity `Tr[A gamma^2]`.
pub fn exchange_product_trace(gamma: &DMatrix<Complex64>, a: &DMatrix<Complex64>) -> Complex64 {
    let g2 = gamma * gamma;
    let mut acc = Complex64::default();
    for i in 0..gamma.nrows() {
        for j in 0..gamma.ncols() {
            acc += a[(i, j)] * g2[(j, i)];
        }
    }
    acc
}

/// The same trace from the literal definition of the exchange operator on
/// the pair basis: `(Ex gamma^{(x)2})_{(cd),(ab)} = gamma_{cb} gamma_{da}`.
pub fn exchange_product_trace_naive(
    gamma: &DMatrix<Complex64>,
    a: &DMatrix<Complex64>,
) -> Complex64 {
    let m = gamma.nrows();
    let mut acc = Complex64::default();
    // Tr[(Id (x) A) Ex g2] = sum (Id (x) A)_{(ab),(cd)} (Ex g2)_{(cd),(ab)}
    //                      = sum delta_{ac} A_{bd} gamma_{cb} gamma_{da}.
    for aa in 0..m {
        for b in 0..m {
            for d in 0..m {
                acc += a[(b, d)] * gamma[(aa, b)] * gamma[(d, aa)];
            }
        }
    }
    acc
}

/// The Hartree-Fock energy of a one-body density:
/// `Tr[(L + V) gamma] + Tr[w gamma_2]` with
/// `gamma_2 = N/(N-1) (1 - Ex) gamma^{(x)2}`.
pub fn hartree_fock_energy(
    gamma: &DMatrix<Complex64>,
    orbital_energies: &[f64],
    potential: &DMatrix<Complex64>,
    interaction: &TwoBodyTensor,
    particles: usize,
) -> Result<f64> {
    let m = gamma.nrows();
    let trace: Complex64 = (0..m).map(|i| gamma[(i, i)]).sum();
    if (trace.re - 1.0).abs() > 1e-8 || trace.im.abs() > 1e-10 {
        return Err(Error::Precondition(format!(
            "Hartree-Fock needs a trace-one density, got {trace}"
        )));
    }
    let eig = nalgebra::SymmetricEigen::new(gamma.clone());
    let cap = 1.0 / particles as f64;
    for &e in eig.eigenvalues.iter() {
        if e < -1e-10 || e > cap + 1e-10 {
            return Err(Error::Precondition(format!(
                "Pauli violation: eigenvalue {e} outside [0, 1/N = {cap}]"
            )));
        }
    }

    let mut energy = Complex64::default();
    for a in 0..m {
        energy += orbital_energies[a] * gamma[(a, a)];
        for b in 0..m {
            energy += potential[(a, b)] * gamma[(b, a)];
        }
    }
    // Direct and exchange contractions of the pair term.
    let mut direct = Complex64::default();
    let mut exchange = Complex64::default();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let w = interaction.get(a, b, c, d);
                    direct += w * gamma[(c, a)] * gamma[(d, b)];
                    exchange += w * gamma[(c, b)] * gamma[(d, a)];
                }
            }
        }
    }
    let nn = particles as f64 / (particles as f64 - 1.0);
    energy += nn * (direct - exchange);
    Ok(energy.re)
}

/// Builds the Slater determinant of `N` orthonormal orbital-space vectors
/// (columns of `u`) as a Fock vector: the coefficient on a determinant is
/// the minor of `u` on its occupied rows.
pub fn slater_state(u: &DMatrix<Complex64>, budget: usize) -> Result<FockVector> {
    let m = u.nrows();
    let n = u.ncols();
    // Orthonormality precondition.
    let gram = u.adjoint() * u;
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - Complex64::new(expected, 0.0)).norm());
        }
    }
    if dev > 1e-12 {
        return Err(Error::Precondition(format!(
            "orbitals are not orthonormal (deviation {dev})"
        )));
    }
    let basis = Arc::new(SlaterBasis::enumerate(m, n, budget)?);
    let mut state = FockVector::zeros(basis.clone());
    for (idx, &mask) in basis.masks.iter().enumerate() {
        let rows: Vec<usize> = (0..m).filter(|&a| (mask >> a) & 1 == 1).collect();
        let mut minor = DMatrix::<Complex64>::zeros(n, n);
        for (r, &row) in rows.iter().enumerate() {
            for c in 0..n {
                minor[(r, c)] = u[(row, c)];
            }
        }
        state.coefficients[idx] = minor.determinant();
    }
    state.normalize();
    Ok(state)
}

/// Dual-route Wick check: the second reduced density of a Slater
/// determinant computed from correlators against
/// `N/(N-1) (1 - Ex) (gamma^{(1)})^{(x)2}`; returns the largest entry
/// difference across both reduced densities.
pub fn wick_check(u: &DMatrix<Complex64>, budget: usize) -> Result<f64> {
    let state = slater_state(u, budget)?;
    let m = u.nrows();
    let n = u.ncols() as f64;
    let gamma1 = reduced_density_one(&state);
    let projector = u * u.adjoint() / Complex64::new(n, 0.0);
    let mut residual = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            residual = residual.max((gamma1[(a, b)] - projector[(a, b)]).norm());
        }
    }
    let gamma2 = reduced_density_two(&state);
    let factor = n / (n - 1.0);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let wick = factor
                        * (gamma1[(a, c)] * gamma1[(b, d)] - gamma1[(a, d)] * gamma1[(b, c)]);
                    residual =
                        residual.max((gamma2[(a * m + b, c * m + d)] - wick).norm());
                }
            }
        }
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::OrbitalSet;
    use crate::manybody::hamiltonian::{ground_state, GroundStateOptions, Hamiltonian};
    use crate::manybody::matrix::{one_body_matrix, two_body_tensor};
    use crate::model::{Grid, PotentialSpec, TorusConfig};
    use rand::{Rng, SeedableRng};

    /// A random orthonormal family via Gram-Schmidt on seeded data.
    fn random_orthonormal(m: usize, n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut u = DMatrix::<Complex64>::zeros(m, n);
        for c in 0..n {
            let mut col: Vec<Complex64> = (0..m)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            for prev in 0..c {
                let overlap: Complex64 =
                    (0..m).map(|r| u[(r, prev)].conj() * col[r]).sum();
                for r in 0..m {
                    let sub = overlap * u[(r, prev)];
                    col[r] -= sub;
                }
            }
            let norm: f64 = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            for r in 0..m {
                u[(r, c)] = col[r] / norm;
            }
        }
        u
    }

    #[test]
    fn wick_residuals_vanish_for_slater_determinants() {
        let r3 = wick_check(&random_orthonormal(6, 3, 7), 100).unwrap();
        assert!(r3 <= 1e-12, "N = 3 residual {r3}");
        let r2 = wick_check(&random_orthonormal(5, 2, 11), 100).unwrap();
        assert!(r2 <= 1e-13, "N = 2 residual {r2}");
        // Non-orthonormal input is rejected.
        let mut bad = random_orthonormal(6, 3, 13);
        bad[(0, 0)] *= Complex64::new(1.1, 0.0);
        assert!(wick_check(&bad, 100).is_err());
    }

    #[test]
    fn exchange_trace_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        let m = 6;
        // A random positive gamma.
        let raw = DMatrix::<Complex64>::from_fn(m, m, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let gamma = &raw * raw.adjoint();
        let a = DMatrix::<Complex64>::from_fn(m, m, |i, j| {
            Complex64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.05)
        });
        let fast = exchange_product_trace(&gamma, &a);
        let slow = exchange_product_trace_naive(&gamma, &a);
        assert!((fast - slow).norm() <= 1e-12 * fast.norm().max(1.0));
        // A = Id reduces to Tr[gamma^2].
        let id = DMatrix::<Complex64>::identity(m, m);
        let tr2: Complex64 = {
            let g2 = &gamma * &gamma;
            (0..m).map(|i| g2[(i, i)]).sum()
        };
        let via_exchange = exchange_product_trace(&gamma, &id);
        assert!((via_exchange - tr2).norm() <= 1e-12 * tr2.norm());
    }

    #[test]
    fn reduced_densities_of_an_interacting_ground_state() {
        let cfg = TorusConfig::new(1.0, 3, 1.0, 1, 4).unwrap();
        let grid = Grid::new(64, 1.0).unwrap();
        let set = OrbitalSet::build(&cfg, 1, grid, 1e-13).unwrap();
        let v = PotentialSpec::Cosine { amplitude: 0.3 }.synthesize(grid).unwrap();
        let w = PotentialSpec::GaussianPeriodic { amplitude: 0.4, width: 0.15 }
            .synthesize(grid)
            .unwrap();
        let vmat = one_body_matrix(&v, &set).unwrap();
        let tensor = two_body_tensor(&w, &set).unwrap();
        let m = set.orbital_count();
        let basis = Arc::new(SlaterBasis::enumerate(m, 4, 10_000).unwrap());
        let slots: Vec<usize> = (0..m).map(|a| set.slot_of(a)).collect();
        let h = Hamiltonian::build(
            basis.clone(),
            set.level_energies(),
            vmat.clone(),
            Some(&tensor),
            slots,
            cfg.degeneracy(),
        )
        .unwrap();
        let (e0, psi) = ground_state(&h, GroundStateOptions::default()).unwrap();

        let gamma1 = reduced_density_one(&psi);
        let tr1: Complex64 = (0..m).map(|i| gamma1[(i, i)]).sum();
        assert!((tr1.re - 1.0).abs() <= 1e-10, "Tr gamma1 = {tr1}");
        let eig = nalgebra::SymmetricEigen::new(gamma1.clone());
        for &ev in eig.eigenvalues.iter() {
            assert!(ev >= -1e-10 && ev <= 0.25 + 1e-10, "Pauli window violated: {ev}");
        }

        let gamma2 = reduced_density_two(&psi);
        let tr2: Complex64 = (0..m * m).map(|i| gamma2[(i, i)]).sum();
        assert!((tr2.re - 1.0).abs() <= 1e-10, "Tr gamma2 = {tr2}");
        // Pair bound 2/(N(N-1)) = 1/6: determinants attain it exactly with
        // a six-fold degeneracy, and the interaction splits that cluster
        // upward at second order in the state mixing. The measured excess
        // stays at the perturbative scale.
        let eig2 = nalgebra::SymmetricEigen::new(gamma2.clone());
        for &ev in eig2.eigenvalues.iter() {
            assert!(ev >= -1e-10 && ev <= 1.0 / 6.0 + 1e-8, "pair eigenvalue {ev}");
        }
        // Exchange antisymmetry of the pair kernel.
        let mut sym_dev = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        sym_dev = sym_dev.max(
                            (gamma2[(a * m + b, c * m + d)]
                                - gamma2[(b * m + a, d * m + c)])
                                .norm(),
                        );
                    }
                }
            }
        }
        assert!(sym_dev <= 1e-12, "coordinate exchange symmetry {sym_dev}");

        // Partial trace consistency.
        let traced = partial_trace_two(&gamma2, m);
        let mut dev = 0.0f64;
        for a in 0..m {
            for c in 0..m {
                dev = dev.max((traced[(a, c)] - gamma1[(a, c)]).norm());
            }
        }
        assert!(dev <= 1e-10, "partial trace deviation {dev}");

        // Energy identity: <H>/N = Tr[(L + V) gamma1] + Tr[w gamma2].
        let mut one_body = Complex64::default();
        for a in 0..m {
            one_body += cfg.level_energy(set.level_of(a)) * gamma1[(a, a)];
            for b in 0..m {
                one_body += vmat[(a, b)] * gamma1[(b, a)];
            }
        }
        let mut pair = Complex64::default();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        pair += tensor.get(a, b, c, d) * gamma2[(c * m + d, a * m + b)];
                    }
                }
            }
        }
        let rhs = (one_body + pair).re;
        let lhs = e0 / 4.0;
        assert!(
            (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0),
            "energy identity: {lhs} vs {rhs}"
        );

        // Hartree-Fock of the kinetic-minimizing determinant upper-bounds
        // the ground energy.
        let det = FockVector::determinant(basis.clone(), basis.fermi_sea()).unwrap();
        let det_gamma = reduced_density_one(&det);
        let hf = hartree_fock_energy(
            &det_gamma,
            &set.level_energies(),
            &vmat,
            &tensor,
            4,
        )
        .unwrap();
        let det_expect = h.expectation(&det) / 4.0;
        assert!(
            (hf - det_expect).abs() <= 1e-10 * det_expect.abs().max(1.0),
            "HF energy {hf} vs determinant expectation {det_expect}"
        );
        assert!(e0 / 4.0 <= hf + 1e-10, "variational bound");
    }
}
