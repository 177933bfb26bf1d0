//! Self-consistent field solvers for `gamma = 1(h + A_eff(gamma))`.

mod config;
mod model;
mod solver;
mod verify;

pub use config::{Algorithm, MuPolicy, Occupation, ScfConfig};
pub use model::MeanFieldModel;
pub use solver::{
    contraction_bound, fixed_point_map, solve, solve_fixed_point, solve_fixed_point_from,
    solve_oda, IterationRecord, ScfResult, SolverTrace,
};
pub use verify::{verify_solution, VerificationReport, VerifyOptions};
