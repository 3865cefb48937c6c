//! Hermite polynomials and Hermite functions.

/// Highest supported level. The plain three-term recurrence is stable in
/// this range; going further would need scaled recurrences.
pub const MAX_LEVEL: usize = 12;

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{n+1} = 2 x H_n - 2 n H_{n-1}`.
pub fn hermite_polynomial(n: usize, x: f64) -> f64 {
    hermite_pair(n, x).1
}

/// `(H_{n-1}(x), H_n(x))`, with `H_{-1} := 0`. One recurrence pass serves
/// both values needed by the ladder formulas.
pub fn hermite_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

/// Hermite function `h_n(x) = H_n(x) e^{-x^2/2}`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    hermite_polynomial(n, x) * (-x * x / 2.0).exp()
}

/// Sum of absolute values of the coefficients of `H_n`; gives the crude
/// bound `|H_n(x)| <= A_n max(1, |x|)^n` used by tail certificates.
pub fn hermite_coeff_abs_sum(n: usize) -> f64 {
    // Coefficient recurrence in the monomial basis.
    let mut prev = vec![0.0f64; n + 1];
    let mut cur = vec![0.0f64; n + 1];
    cur[0] = 1.0;
    let mut deg_prev = 0usize;
    let mut deg_cur = 0usize;
    for k in 0..n {
        let mut next = vec![0.0f64; n + 1];
        for (i, &c) in cur.iter().enumerate().take(deg_cur + 1) {
            if i + 1 <= n {
                next[i + 1] += 2.0 * c;
            }
        }
        for (i, &c) in prev.iter().enumerate().take(deg_prev + 1) {
            next[i] -= 2.0 * k as f64 * c;
        }
        prev = std::mem::replace(&mut cur, next);
        deg_prev = deg_cur;
        deg_cur += 1;
    }
    cur.iter().map(|c| c.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::pairwise_sum;

    #[test]
    fn recurrence_base_cases() {
        assert_eq!(hermite_polynomial(0, 0.7), 1.0);
        assert_eq!(hermite_polynomial(1, 0.7), 1.4);
        assert_eq!(hermite_polynomial(2, 0.0), -2.0);
        assert_eq!(hermite_polynomial(3, 1.0), 8.0 - 12.0); // 8x^3 - 12x at 1
    }

    #[test]
    fn hermite_function_normalization() {
        // ||h_n||^2 = sqrt(pi) 2^n n!; check n = 1 against 1D quadrature:
        // integral of h_1^2 over R equals 2 sqrt(pi).
        let h = 1e-3;
        let half: Vec<f64> = (0..20_000)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                hermite_function(1, x).powi(2) * h
            })
            .collect();
        let integral = 2.0 * pairwise_sum(&half);
        let expected = 2.0 * std::f64::consts::PI.sqrt();
        assert!(
            (integral - expected).abs() < 1e-8,
            "got {integral}, expected {expected}"
        );
    }

    #[test]
    fn hermite_functions_are_orthogonal() {
        // h_0 and h_2 integrate to zero against each other.
        let h = 1e-3;
        let vals: Vec<f64> = (-20_000..20_000)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                hermite_function(0, x) * hermite_function(2, x) * h
            })
            .collect();
        let integral = pairwise_sum(&vals);
        assert!(integral.abs() < 1e-8, "got {integral}");
    }

    #[test]
    fn coefficient_sums_bound_the_polynomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 0..=MAX_LEVEL {
            let a = hermite_coeff_abs_sum(n);
            for _ in 0..200 {
                let x = (rng.gen::<f64>() - 0.5) * 20.0;
                let bound = a * x.abs().max(1.0).powi(n as i32);
                assert!(
                    hermite_polynomial(n, x).abs() <= bound * (1.0 + 1e-12),
                    "n = {n}, x = {x}"
                );
            }
        }
    }
}
