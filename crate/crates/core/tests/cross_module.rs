//! Cross-module properties: Husimi symbols of exact-diagonalization states,
//! two-body symbol contracts, and upper-symbol trace trends.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use landau_core::basis::OrbitalSet;
use landau_core::husimi::{
    build_saturated_density, pair_lower_symbol, DensityMatrix, HusimiTransform,
};
use landau_core::manybody::{
    ground_state, one_body_matrix, reduced_density_one, reduced_density_two, two_body_tensor,
    GroundStateOptions, Hamiltonian, SlaterBasis,
};
use landau_core::model::{convolve_real, PotentialSpec, RealField};
use landau_core::projector::Localizer;
use landau_core::{Grid, TorusConfig};

/// Interacting fixture: d = 3, q = 1, N = 4, one buffer level.
fn interacting_ground_state(
    grid: Grid,
) -> (TorusConfig, OrbitalSet, DMatrix<Complex64>, DMatrix<Complex64>) {
    let cfg = TorusConfig::new(1.0, 3, 1.0, 1, 4).unwrap();
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
        basis,
        set.level_energies(),
        vmat,
        Some(&tensor),
        slots,
        cfg.degeneracy(),
    )
    .unwrap();
    let (_, psi) = ground_state(&h, GroundStateOptions::default()).unwrap();
    let gamma1 = reduced_density_one(&psi);
    let gamma2 = reduced_density_two(&psi);
    (cfg, set, gamma1, gamma2)
}

#[test]
fn pauli_ceiling_of_ed_ground_state_symbols() {
    let grid = Grid::new(64, 1.0).unwrap();
    let (cfg, set, gamma1, _) = interacting_ground_state(grid);
    let transform = HusimiTransform::new(&set, Some(1.3), 1, 1e-12).unwrap();
    let (m, leak) = transform
        .lower_symbol(&DensityMatrix::one_body(gamma1))
        .unwrap();
    assert!(m.min_value() >= 0.0, "lower symbols are non-negative");
    // Eq. 80 ceiling with the measured O(l_b) margin: at this coarse
    // degeneracy the margin is generous but the cap scale is right.
    let cap = cfg.phase_space_cap();
    assert!(
        m.max_value() <= cap * 1.5,
        "one-body symbol {} far above the Pauli scale {cap}",
        m.max_value()
    );
    // Mass accounting stays exact.
    let balance = m.eta_integral() + leak.integrate();
    assert!((balance - 1.0).abs() <= 1e-10, "balance {balance}");
}

#[test]
fn two_body_symbols_are_symmetric_consistent_and_satisfy_the_smearing_identity() {
    let grid = Grid::new(64, 1.0).unwrap();
    let (_cfg, set, gamma1, gamma2) = interacting_ground_state(grid);
    let loc = Localizer::build(1.3, grid).unwrap();
    let stride = 8usize;
    let n_cut = 1usize;
    let pair = pair_lower_symbol(
        &set,
        &loc,
        &DensityMatrix::two_body(gamma2.clone()),
        n_cut,
        stride,
    )
    .unwrap();

    assert!(pair.min_value() >= -1e-12, "positivity, min {}", pair.min_value());
    assert!(
        pair.symmetry_deviation() <= 1e-10,
        "exchange symmetry {}",
        pair.symmetry_deviation()
    );

    // Integrating out the second slot approaches the one-body symbol; the
    // difference is the pair-level leakage, bounded by the one-body
    // leakage of the partial trace through the sup of the window.
    let transform = HusimiTransform::new(&set, Some(1.3), n_cut, 1e-12).unwrap();
    let (m1, leak1) = transform
        .lower_symbol(&DensityMatrix::one_body(gamma1.clone()))
        .unwrap();
    let marginal = pair.first_marginal();
    let window_sup_sq = loc.samples.sup_norm().powi(2);
    let nc = pair.centers.len();
    for n in 0..=n_cut {
        for (c, &(ci, cj)) in pair.centers.iter().enumerate() {
            let got = marginal[n * nc + c];
            let reference = m1.slice(n).values[(ci, cj)];
            let leak_bound = window_sup_sq * leak1.values[(ci, cj)];
            assert!(
                got <= reference + 1e-9,
                "marginal exceeds the one-body symbol at (n={n}, c={c})"
            );
            assert!(
                reference - got <= leak_bound + 1e-8,
                "marginal deficit {} above the leakage bound {leak_bound}",
                reference - got
            );
        }
    }

    // Eq. 82 at order two: the spatial pair density against the doubly
    // smeared exact pair density, with the same leakage accounting.
    let count = set.orbital_count();
    let mut smeared = vec![vec![Complex64::default(); count * count]; nc];
    for a in 0..count {
        for c in 0..count {
            let density = set
                .orbital_flat(c)
                .conj_mul(set.orbital_flat(a))
                .unwrap();
            let conv = convolve_real(&loc.squared, &density.real_part()).unwrap();
            let conv_im = convolve_real(&loc.squared, &{
                RealField { grid, values: density.values.mapv(|v| v.im) }
            })
            .unwrap();
            for (cc, &(ci, cj)) in pair.centers.iter().enumerate() {
                smeared[cc][a * count + c] =
                    Complex64::new(conv.values[(ci, cj)], conv_im.values[(ci, cj)]);
            }
        }
    }
    let weight_sup = loc.samples.sup_norm().powi(2);
    for (c1, &(i1, j1)) in pair.centers.iter().enumerate().take(6) {
        for (c2, &(i2, j2)) in pair.centers.iter().enumerate().take(6) {
            // lhs: sum over resolved level pairs.
            let mut lhs = 0.0;
            for n1 in 0..=n_cut {
                for n2 in 0..=n_cut {
                    lhs += pair.value(n1, c1, n2, c2);
                }
            }
            // rhs: (g^2 (x) g^2) * rho_{gamma2}.
            let mut rhs = Complex64::default();
            for a in 0..count {
                for b in 0..count {
                    for cc in 0..count {
                        for d in 0..count {
                            rhs += gamma2[(a * count + b, cc * count + d)]
                                * smeared[c1][a * count + cc]
                                * smeared[c2][b * count + d];
                        }
                    }
                }
            }
            assert!(rhs.im.abs() <= 1e-10, "pair density is real");
            let diff = rhs.re - lhs;
            let leak_bound = weight_sup
                * (leak1.values[(i1, j1)] + leak1.values[(i2, j2)]);
            assert!(diff >= -1e-8, "negative pair leakage {diff}");
            assert!(
                diff <= leak_bound + 1e-8,
                "pair smearing identity out of budget: diff {diff} vs {leak_bound}"
            );
        }
    }
}

#[test]
fn upper_symbol_trace_defect_shrinks_with_the_magnetic_length() {
    let grid = Grid::new(128, 1.0).unwrap();
    let mut defects = Vec::new();
    let mut lbs = Vec::new();
    for d in [8usize, 16, 32] {
        let n = (3 * d) / 2;
        let cfg = TorusConfig::new(1.0, d, 1.0, 1, n).unwrap();
        let set = OrbitalSet::build(&cfg, 1, grid, 1e-13).unwrap();
        let transform = HusimiTransform::new(&set, None, 1, 1e-12).unwrap();
        let rho = RealField::constant(grid, cfg.partial_mass());
        let m = build_saturated_density(&rho, &cfg).unwrap();
        let gamma = transform.upper_symbol(&m).unwrap();
        defects.push((gamma.trace().re - 1.0).abs());
        lbs.push(cfg.magnetic_length());
    }
    assert!(
        defects[1] < defects[0] && defects[2] < defects[1],
        "trace defect not decreasing: {defects:?}"
    );
    let ratios: Vec<f64> = defects.iter().zip(&lbs).map(|(d, l)| d / l).collect();
    let spread = ratios.iter().cloned().fold(0.0f64, f64::max)
        / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread <= 4.0, "defect/l_b window: {ratios:?}");
}
