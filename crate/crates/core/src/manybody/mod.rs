//! Fermionic exact diagonalization on the truncated orbital basis.
//!
//! Slater determinants are bitmasks over the canonical orbital order
//! `n d + l`; the Hamiltonian applies on the fly row by row, with the
//! two-body terms grouped by the intra-level momentum they conserve.
//! Reduced density matrices come from second-quantized correlators and the
//! Hartree-Fock machinery contracts the same tensors through the exchange
//! identities.

mod fock;
mod hamiltonian;
mod matrix;
mod reduced;
mod study;

pub use fock::{
    annihilate, create, orbital_order_hash, FockVector, SlaterBasis,
};
pub use hamiltonian::{ground_state, GroundStateOptions, Hamiltonian};
pub use matrix::{one_body_matrix, two_body_tensor, TwoBodyTensor};
pub use reduced::{
    exchange_product_trace, exchange_product_trace_naive, hartree_fock_energy,
    partial_trace_two, reduced_density_one, reduced_density_two, slater_state, wick_check,
};
pub use study::{theorem_i5_study, StudyOptions, StudyRow};
