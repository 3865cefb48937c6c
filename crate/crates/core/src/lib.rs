//! Landau-level machinery on a square magnetic torus.
//!
//! The library covers the desk-scale toolchain for two-dimensional fermions
//! in a strong uniform magnetic field with magnetic-periodic boundary
//! conditions:
//!
//! - [`model`]: physical configuration (flux quantization, magnetic length),
//!   periodic grids, quadrature, FFT convolution and potential synthesis;
//! - [`basis`]: the orthonormal eigenbasis of the magnetic Laplacian in
//!   Landau gauge, built from two independent lattice series, together with
//!   ladder operators and magnetic translations;
//! - [`projector`]: Landau-level projector kernels, their diagonals and
//!   localized (coherent-operator) versions;
//! - [`husimi`]: lower/upper symbols of density matrices on the truncated
//!   phase space, the saturated phase-space density and the semi-classical
//!   energy functional;
//! - [`qll`]: the electrostatic minimization problem for the partially
//!   filled level over capped densities, with independent oracles;
//! - [`manybody`]: fermionic exact diagonalization on the orbital basis,
//!   reduced density matrices and Hartree-Fock energies.
//!
//! All operations are deterministic: summations use a fixed pairwise
//! reduction tree and parallel loops never reorder reductions.

pub mod basis;
pub mod error;
pub mod husimi;
pub mod manybody;
pub mod model;
pub mod projector;
pub mod qll;

pub use error::{Error, Result};
pub use model::{ComplexField, Grid, RealField, TorusConfig};
