//! Physical configuration and the numerical substrate.
//!
//! Everything downstream consumes the types defined here: the torus
//! configuration with exact flux quantization, uniform periodic grids with
//! spectrally accurate quadrature, FFT-based periodic convolution and the
//! built-in potential families.

mod bump;
mod config;
mod fft;
mod field;
mod potential;

pub use bump::Bump;
pub use config::TorusConfig;
pub use fft::{convolve_complex, convolve_real, fft2, fft_axis, ifft2};
pub use field::{pairwise_sum, pairwise_sum_complex, ComplexField, Grid, RealField};
pub use potential::{
    localizer_mass_kernel, measured_fourier_coefficients, mollification_error,
    mollification_error_two_body, FourierMode, PotentialSpec,
};

/// Distance on the square torus of side `length`: the minimum of the
/// Euclidean distance over all integer-lattice translates.
///
/// Points are reduced modulo `length` first, so any real coordinates are
/// accepted. The result lies in `[0, length/sqrt(2)]`.
pub fn torus_distance(x: (f64, f64), y: (f64, f64), length: f64) -> f64 {
    let wrap = |t: f64| {
        let t = t.rem_euclid(length);
        if t > length / 2.0 {
            t - length
        } else {
            t
        }
    };
    let dx = wrap(x.0 - y.0);
    let dy = wrap(x.1 - y.1);
    (dx * dx + dy * dy).sqrt()
}
