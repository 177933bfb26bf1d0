//! Lattice domains, external potentials, pair interactions and the operators
//! built from them.

pub mod hamiltonian;
pub mod kernel;
pub mod lattice;
pub mod potential;

pub use hamiltonian::{
    build_hamiltonian, effective_interaction, hf_energy, max_asymmetry, mean_field_operator,
    HamiltonianMatrix, OperatorKind, PairInteraction,
};
pub use kernel::{shell_size, Decay, InteractionKernel};
pub use lattice::LatticeBox;
pub use potential::{keyed_uniform, member_seed, PotentialField};
