//! Diagnostics for the multiscale analysis: box restrictions, border operators,
//! the geometric resolvent identity, localised Hamiltonians `Ĥ(n,L)` and the
//! resonance / good-box classifiers.
//!
//! The classifiers take the perturbation `A_c` to be zero and widen the
//! resonance radius by `2 D exp(-nu L)` instead.

mod boxes;
mod classify;
mod hatted;
mod resolvent;

pub use boxes::{
    border_operator, complement_embedded, restrict, restrict_embedded, BorderOperator, CubeBox,
};
pub use classify::{
    box_pair_geometry, box_pair_sample, diagnose_box, good_box_check, good_box_probability,
    is_resonant, probe_sites, resonance_of, resonance_threshold, BoxDiagnostics, DecayProbe,
    DisorderEnsemble, GoodBoxVerdict, ProbabilityEstimate, ResonanceParams, ResonanceVerdict,
};
pub use hatted::{
    calibrate_truncation, hatted_hamiltonian, hatted_potential, truncation_error,
    HattedHamiltonian, TruncationFit,
};
pub use resolvent::{geometric_resolvent_residual, GeometricResolvent};
