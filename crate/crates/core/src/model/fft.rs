//! 2D FFTs and periodic convolution.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::model::{ComplexField, RealField};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans_for(size: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(size)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(size),
                inverse: planner.plan_fft_inverse(size),
            })
        })
        .clone()
}

fn transform(values: &mut Array2<Complex64>, inverse: bool) {
    let n = values.nrows();
    debug_assert_eq!(n, values.ncols());
    let plans = plans_for(n);
    let fft = if inverse { &plans.inverse } else { &plans.forward };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // Axis 1 (contiguous rows).
    let flat = values.as_slice_mut().expect("standard layout");
    for row in flat.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    // Axis 0: gather each column, transform, scatter back.
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = values[(i, j)];
        }
        fft.process_with_scratch(&mut col, &mut scratch);
        for i in 0..n {
            values[(i, j)] = col[i];
        }
    }
}

/// 1D FFT along one axis of a square array. `inverse` includes the `1/n`
/// normalization, so a forward/inverse pair along the same axis is the
/// identity.
pub fn fft_axis(values: &mut Array2<Complex64>, axis: usize, inverse: bool) {
    let n = values.nrows();
    debug_assert_eq!(n, values.ncols());
    let plans = plans_for(n);
    let fft = if inverse { &plans.inverse } else { &plans.forward };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    if axis == 1 {
        let flat = values.as_slice_mut().expect("standard layout");
        for row in flat.chunks_exact_mut(n) {
            fft.process_with_scratch(row, &mut scratch);
        }
    } else {
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = values[(i, j)];
            }
            fft.process_with_scratch(&mut col, &mut scratch);
            for i in 0..n {
                values[(i, j)] = col[i];
            }
        }
    }
    if inverse {
        let scale = 1.0 / n as f64;
        values.mapv_inplace(|v| v * scale);
    }
}

/// Unnormalized forward 2D DFT: `F[p,q] = sum_ij f[i,j] e^{-2 pi i (pi+qj)/n}`.
pub fn fft2(values: &Array2<Complex64>) -> Array2<Complex64> {
    let mut out = values.clone();
    transform(&mut out, false);
    out
}

/// Inverse of [`fft2`] including the `1/n^2` normalization.
pub fn ifft2(values: &Array2<Complex64>) -> Array2<Complex64> {
    let mut out = values.clone();
    transform(&mut out, true);
    let scale = 1.0 / (out.len() as f64);
    out.mapv_inplace(|v| v * scale);
    out
}

/// Periodic convolution `(f * g)(x) = integral f(y) g(x - y) dy` computed
/// through the FFT; exact for grid-sampled band-limited data up to rounding.
pub fn convolve_complex(f: &ComplexField, g: &ComplexField) -> Result<ComplexField> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid, g.grid)));
    }
    let mut fh = fft2(&f.values);
    let gh = fft2(&g.values);
    fh.zip_mut_with(&gh, |a, b| *a *= b);
    let mut values = ifft2(&fh);
    let area = f.grid.cell_area();
    values.mapv_inplace(|v| v * area);
    Ok(ComplexField { grid: f.grid, values })
}

/// Real periodic convolution; the imaginary residue of the complex path is
/// discarded (it is at rounding level for real inputs).
pub fn convolve_real(f: &RealField, g: &RealField) -> Result<RealField> {
    let out = convolve_complex(&f.to_complex(), &g.to_complex())?;
    Ok(out.real_part())
}
