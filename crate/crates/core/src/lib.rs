//! Hartree-Fock mean-field theory for disordered lattice fermions.
//!
//! The crate builds tight-binding Hamiltonians with a periodic plus random
//! potential, solves the self-consistent projector equation
//! `gamma = 1(-Delta + V + A_eff(gamma))`, and measures the locality, level
//! statistics and localisation properties of the resulting mean-field operator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod model;
pub mod multiscale;
pub mod scf;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use model::{
    build_hamiltonian, effective_interaction, hf_energy, HamiltonianMatrix, InteractionKernel,
    LatticeBox, PairInteraction, PotentialField,
};
pub use scf::{
    solve, solve_fixed_point, solve_oda, Algorithm, MeanFieldModel, MuPolicy, ScfConfig, ScfResult,
};
pub use spectral::{eig_symmetric, find_gap, spectral_projector, DensityMatrix, Eigen, GapReport};
