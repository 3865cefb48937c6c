//! Uniform periodic grids and sampled fields.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Deterministic pairwise summation over a slice.
///
/// The reduction tree depends only on the slice length, so results are
/// bit-reproducible across runs and thread counts.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise summation for complex values; same reduction tree as
/// [`pairwise_sum`].
pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= 32 {
        let mut acc = Complex64::new(0.0, 0.0);
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
}

/// A uniform periodic grid over the square `[0, L)^2`.
///
/// `size` is the number of samples per axis (a power of two) and
/// `spacing * size = length` holds exactly by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    size: usize,
    length: f64,
}

impl Grid {
    pub fn new(size: usize, length: f64) -> Result<Self> {
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= 2, got {size}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("grid period must be positive, got {length}")));
        }
        Ok(Self { size, length })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.size as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing() * self.spacing()
    }

    /// Coordinates of the sample `(i, j)`; axis 0 is x, axis 1 is y.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.spacing(), j as f64 * self.spacing())
    }

    /// Signed Fourier index for FFT bin `i` (range `-size/2 .. size/2`).
    pub fn signed_index(&self, i: usize) -> i64 {
        let n = self.size as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumber of FFT bin `i`: `2 pi s / L` with `s` the signed index.
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.signed_index(i) as f64 / self.length
    }
}

macro_rules! same_grid {
    ($a:expr, $b:expr) => {
        if $a.grid != $b.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                $a.grid, $b.grid
            )));
        }
    };
}

/// A real-valued function sampled on a [`Grid`]. Index `(i, j)` holds the
/// value at `(i h, j h)`.
#[derive(Clone, Debug)]
pub struct RealField {
    pub grid: Grid,
    pub values: Array2<f64>,
}

impl RealField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: Array2::zeros((grid.size(), grid.size())) }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self { grid, values: Array2::from_elem((grid.size(), grid.size()), c) }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Array2::zeros((grid.size(), grid.size()));
        for i in 0..grid.size() {
            for j in 0..grid.size() {
                let (x, y) = grid.point(i, j);
                values[(i, j)] = f(x, y);
            }
        }
        Self { grid, values }
    }

    fn flat(&self) -> &[f64] {
        self.values.as_slice().expect("fields are stored in standard layout")
    }

    /// Uniform-weight quadrature `h^2 * sum`, spectrally accurate for smooth
    /// periodic integrands.
    pub fn integrate(&self) -> f64 {
        self.grid.cell_area() * pairwise_sum(self.flat())
    }

    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.flat().iter().map(|v| v * v).collect();
        (self.grid.cell_area() * pairwise_sum(&sq)).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.flat().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.flat().iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max_value(&self) -> f64 {
        self.flat().iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { grid: self.grid, values: &self.values * s }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_grid!(self, other);
        Ok(Self { grid: self.grid, values: &self.values + &other.values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_grid!(self, other);
        Ok(Self { grid: self.grid, values: &self.values - &other.values })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_grid!(self, other);
        Ok(Self { grid: self.grid, values: &self.values * &other.values })
    }

    /// `h^2 * sum(f g)`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        same_grid!(self, other);
        let prod: Vec<f64> = self
            .flat()
            .iter()
            .zip(other.flat())
            .map(|(a, b)| a * b)
            .collect();
        Ok(self.grid.cell_area() * pairwise_sum(&prod))
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            values: self.values.mapv(|v| Complex64::new(v, 0.0)),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.flat().iter().all(|v| v.is_finite())
    }
}

/// A complex-valued function sampled on a [`Grid`].
#[derive(Clone, Debug)]
pub struct ComplexField {
    pub grid: Grid,
    pub values: Array2<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: Array2::zeros((grid.size(), grid.size())) }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let mut values = Array2::zeros((grid.size(), grid.size()));
        for i in 0..grid.size() {
            for j in 0..grid.size() {
                let (x, y) = grid.point(i, j);
                values[(i, j)] = f(x, y);
            }
        }
        Self { grid, values }
    }

    pub fn flat(&self) -> &[Complex64] {
        self.values.as_slice().expect("fields are stored in standard layout")
    }

    pub fn integrate(&self) -> Complex64 {
        self.grid.cell_area() * pairwise_sum_complex(self.flat())
    }

    /// `h^2 * sum(conj(f) g)`, the L^2 inner product.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        same_grid!(self, other);
        let prod: Vec<Complex64> = self
            .flat()
            .iter()
            .zip(other.flat())
            .map(|(a, b)| a.conj() * b)
            .collect();
        Ok(self.grid.cell_area() * pairwise_sum_complex(&prod))
    }

    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.flat().iter().map(|v| v.norm_sqr()).collect();
        (self.grid.cell_area() * pairwise_sum(&sq)).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.flat().iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.mapv(|v| v * s) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_grid!(self, other);
        Ok(Self { grid: self.grid, values: &self.values + &other.values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_grid!(self, other);
        Ok(Self { grid: self.grid, values: &self.values - &other.values })
    }

    /// Pointwise `conj(self) * other`, the pair density of two orbitals.
    pub fn conj_mul(&self, other: &Self) -> Result<Self> {
        same_grid!(self, other);
        let mut values = other.values.clone();
        values.zip_mut_with(&self.values, |o, s| *o *= s.conj());
        Ok(Self { grid: self.grid, values })
    }

    /// Pointwise multiply by a real field.
    pub fn mul_real(&self, other: &RealField) -> Result<Self> {
        same_grid!(self, other);
        let mut values = self.values.clone();
        values.zip_mut_with(&other.values, |s, o| *s *= *o);
        Ok(Self { grid: self.grid, values })
    }

    /// `|f|^2` as a real field.
    pub fn abs_sq(&self) -> RealField {
        RealField { grid: self.grid, values: self.values.mapv(|v| v.norm_sqr()) }
    }

    pub fn real_part(&self) -> RealField {
        RealField { grid: self.grid, values: self.values.mapv(|v| v.re) }
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.flat().iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.flat().iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}
