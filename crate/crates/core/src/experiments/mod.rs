//! Seeded experiment recipes producing [`ResultTable`]s: convergence traces,
//! density response, level counting, eigenvector localisation, strong
//! interaction scenarios, periodic-amplitude sweeps and box diagnostics.
//!
//! Ensemble member `i` uses the disorder seed `member_seed(seed, i)`; members
//! run in parallel and are aggregated in index order, so outputs do not depend
//! on the thread count.

mod convergence;
mod gap_closing;
mod localisation;
mod locality;
pub mod observables;
mod probe;
mod spec;
mod sweep;
mod table;
mod verify;
mod wegner;

pub use convergence::convergence_experiment;
pub use gap_closing::{
    gap_closing_experiment, Scenario, BUMP_NEIGHBOURS, GAP_FRACTION, REFERENCE_GAPLESS_MU,
    SCENARIOS,
};
pub use localisation::{localisation_experiment, STDDEV_DEFINITION};
pub use locality::{locality_experiment, TAIL_DISTANCE};
pub use probe::{multiscale_probe, CALIBRATION_RADII};
pub use spec::{ExperimentKind, ExperimentSpec, Filling, Knobs, MuRule};
pub use sweep::periodic_sweep;
pub use table::{format_real, Cell, Column, ColumnKind, ResultTable};
pub use verify::{verify_experiment, VERIFY_TOLERANCE};
pub use wegner::{wegner_experiment, WegnerComparison};

use crate::error::Result;
use crate::scf::ScfResult;

/// Runs the experiment named in `spec`. Invalid specifications are errors;
/// numerical failures come back as a table marked failed.
pub fn run(spec: &ExperimentSpec) -> Result<ResultTable> {
    match spec.experiment {
        ExperimentKind::Converge => convergence_experiment(spec),
        ExperimentKind::Locality => locality_experiment(spec),
        ExperimentKind::Wegner => wegner_experiment(spec),
        ExperimentKind::Localisation => localisation_experiment(spec),
        ExperimentKind::GapClosing => gap_closing_experiment(spec),
        ExperimentKind::SweepPeriodic => periodic_sweep(spec),
        ExperimentKind::MultiscaleProbe => multiscale_probe(spec),
        ExperimentKind::Verify => verify_experiment(spec),
    }
}

pub(crate) fn record_solution(table: &mut ResultTable, result: &ScfResult) {
    table.meta("converged", result.converged);
    table.meta("iterations", result.iterations);
    table.meta("algorithm", format!("{:?}", result.algorithm));
    table.meta_real("particle_number", result.particle_number());
    table.meta_real("mu", result.mu);
    table.meta_real("energy", result.energy);
    table.meta_real("fixed_point_residual", result.fixed_point_residual);
}
