//! Electrostatic minimization in the partially filled level.
//!
//! Minimizes `E[rho] = int V rho + int int w(x-y) rho(x) rho(y)` over
//! densities with fixed total mass `r/(q+r)` and pointwise ceiling
//! `1/((q+r) L^2)`. With a non-negative interaction transform the problem
//! is convex and projected gradient descent with exact projection gives a
//! verifiable KKT certificate. Independent oracles: a breakpoint-sorting
//! projection and the bathtub fill for the interaction-free case.

use crate::error::{Error, Result};
use crate::husimi::{build_saturated_density, semiclassical_energy};
use crate::model::{convolve_real, Grid, RealField, TorusConfig};

/// The constrained problem data.
#[derive(Clone, Debug)]
pub struct QllProblem {
    pub potential: RealField,
    pub interaction: RealField,
    /// Target total mass of the density.
    pub mass: f64,
    /// Pointwise ceiling.
    pub cap: f64,
}

impl QllProblem {
    /// Builds the problem from a configuration; mass and cap come from the
    /// exact integer forms `r/(q+r) = (N - q d)/N` and `1/((q+r)L^2) =
    /// d/(N L^2)`.
    pub fn new(cfg: &TorusConfig, potential: RealField, interaction: RealField) -> Result<Self> {
        Self::with_constraints(potential, interaction, cfg.partial_mass(), cfg.density_cap())
    }

    /// Direct constructor for tests and sub-problems.
    pub fn with_constraints(
        potential: RealField,
        interaction: RealField,
        mass: f64,
        cap: f64,
    ) -> Result<Self> {
        if potential.grid != interaction.grid {
            return Err(Error::GridMismatch("potential vs interaction".into()));
        }
        if mass < 0.0 || cap <= 0.0 {
            return Err(Error::Precondition(format!(
                "mass {mass} and cap {cap} must be non-negative / positive"
            )));
        }
        let volume = potential.grid.length() * potential.grid.length();
        if mass > cap * volume * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "infeasible: mass {mass} exceeds cap * L^2 = {}",
                cap * volume
            )));
        }
        // The interaction must be even: w(x) = w(-x) on the grid.
        let m = interaction.grid.size();
        let mut asym = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let mirrored = interaction.values[((m - i) % m, (m - j) % m)];
                asym = asym.max((interaction.values[(i, j)] - mirrored).abs());
            }
        }
        if asym > 1e-12 * interaction.sup_norm().max(1.0) {
            return Err(Error::Precondition(format!(
                "interaction is not even under x -> -x (asymmetry {asym})"
            )));
        }
        Ok(Self { potential, interaction, mass, cap })
    }

    pub fn grid(&self) -> Grid {
        self.potential.grid
    }
}

/// `E[rho] = int V rho + int rho (w * rho)`; the double integral runs
/// through one FFT convolution and one quadrature.
pub fn qll_energy(rho: &RealField, prob: &QllProblem) -> Result<f64> {
    interaction_energy_direct(rho, &prob.potential, &prob.interaction)
}

/// The same functional on explicit fields.
pub fn interaction_energy_direct(
    rho: &RealField,
    potential: &RealField,
    interaction: &RealField,
) -> Result<f64> {
    let external = potential.inner(rho)?;
    let smeared = convolve_real(interaction, rho)?;
    Ok(external + rho.inner(&smeared)?)
}

/// First variation `V + 2 (w * rho)`, using that `w` is even.
pub fn qll_gradient(rho: &RealField, prob: &QllProblem) -> Result<RealField> {
    let smeared = convolve_real(&prob.interaction, rho)?;
    prob.potential.add(&smeared.scaled(2.0))
}

/// Euclidean projection onto `{0 <= rho <= cap, int rho = mass}` by
/// monotone bisection on the shift multiplier.
pub fn project_onto_domain(rho: &RealField, prob: &QllProblem) -> Result<RealField> {
    let area = rho.grid.cell_area();
    let clipped_mass = |mu: f64| -> f64 {
        let mut acc = 0.0;
        for v in rho.values.iter() {
            acc += (v - mu).clamp(0.0, prob.cap);
        }
        acc * area
    };
    let mut lo = rho.min_value() - prob.cap - 1.0;
    let mut hi = rho.max_value() + 1.0;
    debug_assert!(clipped_mass(lo) >= prob.mass && clipped_mass(hi) <= prob.mass);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if clipped_mass(mid) >= prob.mass {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let projected = RealField {
        grid: rho.grid,
        values: rho.values.mapv(|v| (v - mu).clamp(0.0, prob.cap)),
    };
    let residual = (projected.integrate() - prob.mass).abs();
    if residual > 1e-10 * prob.mass.max(1.0) {
        return Err(Error::NonConverged(format!(
            "projection mass residual {residual}"
        )));
    }
    Ok(projected)
}

/// Independent projection oracle: solves for the multiplier exactly by
/// sorting the breakpoints of the piecewise-linear mass function.
pub fn project_sorted_oracle(rho: &RealField, prob: &QllProblem) -> RealField {
    let area = rho.grid.cell_area();
    let values: Vec<f64> = rho.values.iter().copied().collect();
    let mut breakpoints: Vec<f64> = values
        .iter()
        .flat_map(|&v| [v, v - prob.cap])
        .collect();
    breakpoints.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mass_at = |mu: f64| -> f64 {
        values.iter().map(|&v| (v - mu).clamp(0.0, prob.cap)).sum::<f64>() * area
    };
    // Find the segment bracketing the target mass; mass_at decreases in mu.
    let mut mu = breakpoints[0] - 1.0;
    for pair in breakpoints.windows(2) {
        if mass_at(pair[1]) <= prob.mass {
            // Linear on [pair[0], pair[1]]: interpolate exactly.
            let m0 = mass_at(pair[0]);
            let m1 = mass_at(pair[1]);
            mu = if (m1 - m0).abs() < f64::MIN_POSITIVE {
                pair[0]
            } else {
                pair[0] + (prob.mass - m0) * (pair[1] - pair[0]) / (m1 - m0)
            };
            break;
        }
    }
    RealField {
        grid: rho.grid,
        values: rho.values.mapv(|v| (v - mu).clamp(0.0, prob.cap)),
    }
}

/// Bathtub fill: sorts cells by potential value (ties by index) and fills
/// at the cap until the mass is exhausted, fractional on the marginal cell.
/// Optimal for the linear (`w = 0`) objective under box and mass
/// constraints.
pub fn bathtub_oracle(potential: &RealField, mass: f64, cap: f64) -> RealField {
    let grid = potential.grid;
    let area = grid.cell_area();
    let mut order: Vec<usize> = (0..grid.size() * grid.size()).collect();
    let flat: Vec<f64> = potential.values.iter().copied().collect();
    order.sort_by(|&a, &b| flat[a].partial_cmp(&flat[b]).expect("finite").then(a.cmp(&b)));
    let mut remaining = mass;
    let mut out = vec![0.0; flat.len()];
    for idx in order {
        if remaining <= 0.0 {
            break;
        }
        let cell_mass = cap * area;
        if remaining >= cell_mass {
            out[idx] = cap;
            remaining -= cell_mass;
        } else {
            out[idx] = remaining / area;
            remaining = 0.0;
        }
    }
    let values = ndarray::Array2::from_shape_vec((grid.size(), grid.size()), out)
        .expect("shape matches");
    RealField { grid, values }
}

/// Options for the projected-gradient solver.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_iterations: 20_000 }
    }
}

/// One solver iteration record, for the JSON log.
#[derive(Clone, Copy, Debug)]
pub struct IterationRecord {
    pub iteration: usize,
    pub energy: f64,
    pub residual: f64,
}

/// Solver output.
#[derive(Clone, Debug)]
pub struct QllSolution {
    pub density: RealField,
    pub energy: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub log: Vec<IterationRecord>,
}

/// Projected gradient descent with Barzilai-Borwein steps and Armijo
/// backtracking; terminates on the fixed-point residual
/// `|| rho - Proj(rho - grad) ||_{L^2}`. Starts from the flat feasible
/// density.
pub fn minimize_qll(prob: &QllProblem, opts: SolverOptions) -> Result<QllSolution> {
    let grid = prob.grid();
    let volume = grid.length() * grid.length();
    let flat = RealField::constant(grid, prob.mass / volume);
    minimize_qll_from(prob, &flat, opts)
}

/// [`minimize_qll`] from an explicit start (projected onto the domain
/// first).
pub fn minimize_qll_from(
    prob: &QllProblem,
    start: &RealField,
    opts: SolverOptions,
) -> Result<QllSolution> {
    let grid = prob.grid();
    if prob.mass == 0.0 {
        // r = 0 degenerates to the empty level.
        let density = RealField::zeros(grid);
        return Ok(QllSolution {
            energy: qll_energy(&density, prob)?,
            kkt_residual: 0.0,
            iterations: 0,
            converged: true,
            log: Vec::new(),
            density,
        });
    }
    let mut rho = project_onto_domain(start, prob)?;
    let mut energy = qll_energy(&rho, prob)?;
    let mut gradient = qll_gradient(&rho, prob)?;
    let mut step = prob.cap / gradient.sup_norm().max(1e-30);
    let mut log = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut kkt = f64::INFINITY;

    for iter in 0..opts.max_iterations {
        iterations = iter + 1;
        // Armijo backtracking along the projection arc. The slack term
        // keeps steps acceptable once true decreases fall below the
        // floating-point resolution of the energy.
        let slack = 4.0 * f64::EPSILON * energy.abs().max(1e-300);
        let mut trial;
        let mut trial_energy;
        let mut backtracks = 0;
        loop {
            let moved = rho.sub(&gradient.scaled(step))?;
            trial = project_onto_domain(&moved, prob)?;
            trial_energy = qll_energy(&trial, prob)?;
            let direction = trial.sub(&rho)?;
            let slope = gradient.inner(&direction)?;
            if trial_energy <= energy + 1e-4 * slope + slack || backtracks >= 60 {
                break;
            }
            step *= 0.5;
            backtracks += 1;
        }
        let delta_rho = trial.sub(&rho)?;
        let new_gradient = qll_gradient(&trial, prob)?;
        let delta_grad = new_gradient.sub(&gradient)?;
        // BB1 step for the next iteration, clamped.
        let ss = delta_rho.inner(&delta_rho)?;
        let sy = delta_rho.inner(&delta_grad)?;
        step = if sy > 1e-300 { (ss / sy).clamp(1e-12, 1e12) } else { step * 2.0 };

        rho = trial;
        energy = trial_energy;
        gradient = new_gradient;

        // Fixed-point residual at unit reference step.
        let reference = project_onto_domain(&rho.sub(&gradient)?, prob)?;
        let residual = reference.sub(&rho)?.l2_norm();
        kkt = kkt_residual(&rho, &gradient, prob);
        log.push(IterationRecord { iteration: iterations, energy, residual });
        if residual <= opts.tolerance {
            converged = true;
            break;
        }
    }

    Ok(QllSolution {
        density: rho,
        energy,
        kkt_residual: kkt,
        iterations,
        converged,
        log,
    })
}

/// KKT residual: on the inactive set the gradient must be constant (the
/// multiplier); the gradient must lie above it where the density is at
/// zero, below it where the density is at the cap.
pub fn kkt_residual(rho: &RealField, gradient: &RealField, prob: &QllProblem) -> f64 {
    let edge = 1e-12 * prob.cap;
    let mut inactive_sum = 0.0;
    let mut inactive_count = 0usize;
    for (r, g) in rho.values.iter().zip(gradient.values.iter()) {
        if *r > edge && *r < prob.cap - edge {
            inactive_sum += *g;
            inactive_count += 1;
        }
    }
    let mu = if inactive_count > 0 {
        inactive_sum / inactive_count as f64
    } else {
        // All cells active: any multiplier between the active bounds works.
        let mut max_cap = f64::NEG_INFINITY;
        let mut min_zero = f64::INFINITY;
        for (r, g) in rho.values.iter().zip(gradient.values.iter()) {
            if *r >= prob.cap - edge {
                max_cap = max_cap.max(*g);
            } else {
                min_zero = min_zero.min(*g);
            }
        }
        match (max_cap.is_finite(), min_zero.is_finite()) {
            (true, true) => 0.5 * (max_cap + min_zero),
            (true, false) => max_cap,
            _ => min_zero,
        }
    };
    let mut worst = 0.0f64;
    for (r, g) in rho.values.iter().zip(gradient.values.iter()) {
        let violation = if *r <= edge {
            (mu - g).max(0.0)
        } else if *r >= prob.cap - edge {
            (g - mu).max(0.0)
        } else {
            (g - mu).abs()
        };
        worst = worst.max(violation);
    }
    worst
}

/// The filled-level constants of the energy decomposition:
/// `E^{q,r} = (q^2 + 2qr + r)/(q + r)`,
/// `E_V^{q,r} = q/((q+r)L^2) int V`,
/// `E_w^{q,r} = (q^2 + 2qr)/((q+r)^2 L^4) int int w`,
/// all evaluated through the exact integer forms of `q + r = N/d`.
pub fn filled_level_constants(
    cfg: &TorusConfig,
    potential: &RealField,
    interaction: &RealField,
) -> Result<(f64, f64, f64)> {
    let q = cfg.filled_levels() as i64;
    let d = cfg.degeneracy() as i64;
    let n = cfg.particles() as i64;
    if q == 0 && n == q * d {
        return Err(Error::Precondition("q = r = 0 leaves no occupied level".into()));
    }
    // E^{q,r} = [q^2 d + (2q + 1)(N - q d)] / N.
    let e_level = (q * q * d + (2 * q + 1) * (n - q * d)) as f64 / n as f64;
    // E_V = q cap int V with cap = d/(N L^2).
    let e_v = q as f64 * cfg.density_cap() * potential.integrate();
    // E_w = q (2N - q d) d / (N^2 L^2) int w, using int int w = L^2 int w.
    let l2 = cfg.length() * cfg.length();
    let e_w = (q * (2 * n - q * d) * d) as f64 / (n * n) as f64 / l2 * interaction.integrate();
    Ok((e_level, e_v, e_w))
}

/// Residual of the energy decomposition: the semi-classical energy of the
/// saturated density against the filled-level constants plus the
/// partial-level functional, relative to the total scale.
pub fn decomposition_check(
    rho: &RealField,
    cfg: &TorusConfig,
    potential: &RealField,
    interaction: &RealField,
) -> Result<f64> {
    let m = build_saturated_density(rho, cfg)?;
    let lhs = semiclassical_energy(&m, potential, interaction, cfg)?;
    let (e_level, e_v, e_w) = filled_level_constants(cfg, potential, interaction)?;
    let hb = cfg.hbar() * cfg.field_amplitude();
    let rhs = hb * e_level + e_v + e_w
        + interaction_energy_direct(rho, potential, interaction)?;
    Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PotentialSpec;
    use rand::{Rng, SeedableRng};

    fn config() -> TorusConfig {
        TorusConfig::new(1.0, 4, 1.0, 1, 6).unwrap()
    }

    fn random_feasible(
        grid: Grid,
        prob: &QllProblem,
        rng: &mut impl Rng,
    ) -> RealField {
        let raw = RealField::from_fn(grid, |_, _| rng.gen::<f64>() * prob.cap);
        project_onto_domain(&raw, prob).unwrap()
    }

    #[test]
    fn energy_matches_brute_force_double_sum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let grid = Grid::new(8, 1.0).unwrap();
        let v = RealField::from_fn(grid, |_, _| rng.gen::<f64>() - 0.5);
        // An even interaction: symmetrize random samples.
        let raw = RealField::from_fn(grid, |_, _| rng.gen::<f64>() - 0.5);
        let m = grid.size();
        let mut w = RealField::zeros(grid);
        for i in 0..m {
            for j in 0..m {
                w.values[(i, j)] =
                    0.5 * (raw.values[(i, j)] + raw.values[((m - i) % m, (m - j) % m)]);
            }
        }
        let prob = QllProblem::with_constraints(v.clone(), w.clone(), 0.3, 1.0).unwrap();
        let rho = RealField::from_fn(grid, |_, _| rng.gen::<f64>());
        let fast = qll_energy(&rho, &prob).unwrap();
        // O(M^4) brute force.
        let h2 = grid.cell_area();
        let mut pair = 0.0;
        for i in 0..m {
            for j in 0..m {
                for a in 0..m {
                    for b in 0..m {
                        let wij = w.values[((i + m - a) % m, (j + m - b) % m)];
                        pair += rho.values[(i, j)] * wij * rho.values[(a, b)];
                    }
                }
            }
        }
        let slow = v.inner(&rho).unwrap() + pair * h2 * h2;
        assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1.0), "{fast} vs {slow}");
    }

    #[test]
    fn zero_fields_give_zero_energy_and_gradient_reduces_to_v() {
        let grid = Grid::new(16, 1.0).unwrap();
        let zero = RealField::zeros(grid);
        let prob = QllProblem::with_constraints(zero.clone(), zero.clone(), 0.2, 1.0).unwrap();
        let rho = RealField::constant(grid, 0.2);
        assert_eq!(qll_energy(&rho, &prob).unwrap(), 0.0);

        let v = PotentialSpec::Cosine { amplitude: 1.0 }.synthesize(grid).unwrap();
        let prob_v =
            QllProblem::with_constraints(v.clone(), zero.clone(), 0.2, 1.0).unwrap();
        let g = qll_gradient(&rho, &prob_v).unwrap();
        assert!(g.sub(&v).unwrap().sup_norm() < 1e-14, "w = 0 gradient is V");
        let g0 = qll_gradient(&zero, &prob_v).unwrap();
        assert!(g0.sub(&v).unwrap().sup_norm() < 1e-14, "rho = 0 gradient is V");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        let grid = Grid::new(32, 1.0).unwrap();
        let v = PotentialSpec::Cosine { amplitude: 0.7 }.synthesize(grid).unwrap();
        let w = PotentialSpec::GaussianPeriodic { amplitude: 0.9, width: 0.15 }
            .synthesize(grid)
            .unwrap();
        let prob = QllProblem::with_constraints(v, w, 0.3, 1.5).unwrap();
        let rho = RealField::from_fn(grid, |_, _| rng.gen::<f64>());
        let g = qll_gradient(&rho, &prob).unwrap();
        for _ in 0..10 {
            let dir = RealField::from_fn(grid, |_, _| rng.gen::<f64>() - 0.5);
            let eps = 1e-6;
            let ep = qll_energy(&rho.add(&dir.scaled(eps)).unwrap(), &prob).unwrap();
            let em = qll_energy(&rho.sub(&dir.scaled(eps)).unwrap(), &prob).unwrap();
            let fd = (ep - em) / (2.0 * eps);
            let an = g.inner(&dir).unwrap();
            assert!(
                (fd - an).abs() <= 1e-6 * an.abs().max(1.0),
                "finite difference {fd} vs analytic {an}"
            );
        }
    }

    #[test]
    fn projection_agrees_with_the_sorting_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        let grid = Grid::new(16, 1.0).unwrap();
        let zero = RealField::zeros(grid);
        let prob = QllProblem::with_constraints(zero.clone(), zero, 0.37, 0.9).unwrap();
        for _ in 0..20 {
            let raw = RealField::from_fn(grid, |_, _| (rng.gen::<f64>() - 0.3) * 3.0);
            let fast = project_onto_domain(&raw, &prob).unwrap();
            let slow = project_sorted_oracle(&raw, &prob);
            assert!(
                fast.sub(&slow).unwrap().sup_norm() <= 1e-10,
                "projection mismatch"
            );
            assert!((fast.integrate() - prob.mass).abs() <= 1e-10);
            assert!(fast.min_value() >= 0.0 && fast.max_value() <= prob.cap + 1e-14);
        }
        // Feasible input is returned unchanged.
        let feasible = RealField::constant(grid, 0.37);
        let back = project_onto_domain(&feasible, &prob).unwrap();
        assert!(back.sub(&feasible).unwrap().sup_norm() <= 1e-12);
    }

    #[test]
    fn bathtub_fills_the_sublevel_set_and_lower_bounds_feasible_energies() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(67);
        let grid = Grid::new(16, 1.0).unwrap();
        let v = PotentialSpec::Cosine { amplitude: 1.0 }.synthesize(grid).unwrap();
        let mass = 0.25;
        let cap = 1.0;
        let tub = bathtub_oracle(&v, mass, cap);
        assert!((tub.integrate() - mass).abs() <= 1e-12);
        // The filled region sits where V is smallest: every filled cell has
        // potential below every empty cell (up to the marginal cell).
        let mut filled_max = f64::NEG_INFINITY;
        let mut empty_min = f64::INFINITY;
        for (r, p) in tub.values.iter().zip(v.values.iter()) {
            if *r >= cap {
                filled_max = filled_max.max(*p);
            } else if *r == 0.0 {
                empty_min = empty_min.min(*p);
            }
        }
        assert!(filled_max <= empty_min + 1e-12, "sublevel-set structure");
        // Optimality spot-check against random feasible densities.
        let zero = RealField::zeros(grid);
        let prob = QllProblem::with_constraints(v.clone(), zero, mass, cap).unwrap();
        let tub_energy = qll_energy(&tub, &prob).unwrap();
        for _ in 0..100 {
            let rho = random_feasible(grid, &prob, &mut rng);
            let e = qll_energy(&rho, &prob).unwrap();
            assert!(tub_energy <= e + 1e-10, "bathtub beaten: {tub_energy} vs {e}");
        }
        // Constant potential: any feasible density is optimal and the
        // oracle energy is V-bar times the mass.
        let vc = RealField::constant(grid, 0.7);
        let tub_c = bathtub_oracle(&vc, mass, cap);
        let e_c = vc.inner(&tub_c).unwrap();
        assert!((e_c - 0.7 * mass).abs() <= 1e-12);
    }

    #[test]
    fn flat_minimizer_for_zero_potential_and_convex_interaction() {
        let cfg = config();
        let grid = Grid::new(64, 1.0).unwrap();
        let zero = RealField::zeros(grid);
        let w = PotentialSpec::GaussianPeriodic { amplitude: 1.0, width: 0.1 }
            .synthesize(grid)
            .unwrap();
        let prob = QllProblem::new(&cfg, zero, w).unwrap();
        let sol = minimize_qll(&prob, SolverOptions::default()).unwrap();
        assert!(sol.converged);
        let rho0 = cfg.partial_mass() / 1.0;
        let dev = sol
            .density
            .values
            .iter()
            .fold(0.0f64, |m, &v| m.max((v - rho0).abs()));
        assert!(dev <= 1e-6, "flat minimizer deviation {dev}");
        assert!(sol.kkt_residual <= 1e-8, "kkt {}", sol.kkt_residual);
    }

    #[test]
    fn linear_case_matches_the_bathtub_energy() {
        let cfg = config();
        let grid = Grid::new(64, 1.0).unwrap();
        let v = PotentialSpec::Cosine { amplitude: 1.0 }.synthesize(grid).unwrap();
        let zero = RealField::zeros(grid);
        let prob = QllProblem::new(&cfg, v.clone(), zero).unwrap();
        let sol = minimize_qll(&prob, SolverOptions::default()).unwrap();
        let tub = bathtub_oracle(&v, prob.mass, prob.cap);
        let tub_energy = qll_energy(&tub, &prob).unwrap();
        assert!(
            (sol.energy - tub_energy).abs() <= 1e-8,
            "solver {} vs bathtub {tub_energy}",
            sol.energy
        );
        // Energy is monotone along the iteration log.
        for pair in sol.log.windows(2) {
            assert!(pair[1].energy <= pair[0].energy + 1e-12, "monotone descent");
        }
    }

    /// An interaction whose transform is strictly positive on every grid
    /// mode, including the Nyquist rows: the problem is then strongly
    /// convex in all resolvable directions and the minimizer is unique.
    fn grid_complete_interaction(grid: Grid, floor: f64) -> RealField {
        use num_complex::Complex64;
        let m = grid.size();
        let mut coeffs = ndarray::Array2::<Complex64>::zeros((m, m));
        for i in 0..m {
            for j in 0..m {
                let p = grid.signed_index(i) as f64;
                let q = grid.signed_index(j) as f64;
                coeffs[(i, j)] =
                    Complex64::new((-0.05 * (p * p + q * q)).exp() + floor, 0.0);
            }
        }
        let values = crate::model::ifft2(&coeffs).mapv(|v| v.re * m as f64 * m as f64
            / (grid.length() * grid.length()));
        RealField { grid, values }
    }

    #[test]
    fn convexity_and_uniqueness_spot_checks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(83);
        let grid = Grid::new(32, 1.0).unwrap();
        let w = PotentialSpec::GaussianPeriodic { amplitude: 0.8, width: 0.12 }
            .synthesize(grid)
            .unwrap();
        // Hessian form h -> 2 int int w h h is non-negative on zero-mean h.
        for _ in 0..100 {
            let mut h = RealField::from_fn(grid, |_, _| rng.gen::<f64>() - 0.5);
            let mean = h.integrate() / 1.0;
            h = h.sub(&RealField::constant(grid, mean)).unwrap();
            let smeared = convolve_real(&w, &h).unwrap();
            let quad = 2.0 * h.inner(&smeared).unwrap();
            assert!(quad >= -1e-10, "hessian form {quad}");
        }
        // Two random feasible starts converge to the same minimizer of a
        // strictly convex problem.
        let v = PotentialSpec::Cosine { amplitude: 0.5 }.synthesize(grid).unwrap();
        let ws = grid_complete_interaction(grid, 0.05);
        let prob = QllProblem::with_constraints(v, ws, 0.4, 1.2).unwrap();
        let opts = SolverOptions::default();
        let a = minimize_qll_from(&prob, &random_feasible(grid, &prob, &mut rng), opts)
            .unwrap();
        let b = minimize_qll_from(&prob, &random_feasible(grid, &prob, &mut rng), opts)
            .unwrap();
        assert!(a.converged && b.converged);
        let dev = a.density.sub(&b.density).unwrap().sup_norm();
        assert!(dev <= 1e-5, "two starts disagree by {dev}");
    }

    #[test]
    fn decomposition_identity_for_random_feasible_profiles() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(89);
        let grid = Grid::new(64, 1.0).unwrap();
        for (q, d, n) in [(1usize, 4usize, 6usize), (2, 6, 14)] {
            let cfg = TorusConfig::new(1.0, d, 1.0, q, n).unwrap();
            let v = PotentialSpec::Cosine { amplitude: 0.4 }.synthesize(grid).unwrap();
            let w = PotentialSpec::GaussianPeriodic { amplitude: 0.6, width: 0.1 }
                .synthesize(grid)
                .unwrap();
            let prob = QllProblem::new(&cfg, v.clone(), w.clone()).unwrap();
            for _ in 0..5 {
                let rho = random_feasible(grid, &prob, &mut rng);
                let residual = decomposition_check(&rho, &cfg, &v, &w).unwrap();
                assert!(residual <= 1e-10, "decomposition residual {residual}");
            }
            // Linearity in w: the residual is unchanged under w -> 2w.
            let rho = random_feasible(grid, &prob, &mut rng);
            let r1 = decomposition_check(&rho, &cfg, &v, &w).unwrap();
            let r2 = decomposition_check(&rho, &cfg, &v, &w.scaled(2.0)).unwrap();
            assert!((r1 - r2).abs() <= 1e-10, "scaling broke the residual");
        }
    }

    #[test]
    fn filled_level_constants_match_hand_values() {
        let grid = Grid::new(32, 1.0).unwrap();
        let zero = RealField::zeros(grid);
        let cfg = config(); // q = 1, r = 1/2
        let (e, ev, _) = filled_level_constants(&cfg, &zero, &zero).unwrap();
        assert!((e - 5.0 / 3.0).abs() < 1e-15, "E^{{1,1/2}} = 5/3, got {e}");
        assert_eq!(ev, 0.0);
        // q = 0: a pure lowest-level gas at one unit per particle.
        let cfg0 = TorusConfig::new(1.0, 4, 1.0, 0, 2).unwrap();
        let (e0, _, _) = filled_level_constants(&cfg0, &zero, &zero).unwrap();
        assert!((e0 - 1.0).abs() < 1e-15);
        // Zero-mean V gives E_V = 0.
        let v = PotentialSpec::Cosine { amplitude: 1.0 }.synthesize(grid).unwrap();
        let (_, ev2, _) = filled_level_constants(&cfg, &v, &zero).unwrap();
        assert!(ev2.abs() < 1e-13);
    }

    #[test]
    fn r_zero_short_circuits_to_the_zero_density() {
        let cfg = TorusConfig::new(1.0, 4, 1.0, 1, 4).unwrap();
        let grid = Grid::new(32, 1.0).unwrap();
        let v = PotentialSpec::Cosine { amplitude: 1.0 }.synthesize(grid).unwrap();
        let prob = QllProblem::new(&cfg, v, RealField::zeros(grid)).unwrap();
        let sol = minimize_qll(&prob, SolverOptions::default()).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.density.sup_norm(), 0.0);
        assert_eq!(sol.iterations, 0);
    }
}
