use super::table::{Cell, Column, ResultTable};
use super::{record_solution, ExperimentSpec};
use crate::error::Result;
use crate::scf::{solve, verify_solution, VerifyOptions};

/// Tolerance used for the overall pass flag.
pub const VERIFY_TOLERANCE: f64 = 1e-7;

/// Converged solution checked for projector algebra, self-consistency and
/// local optimality under small occupied/empty rotations.
pub fn verify_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let mut table = ResultTable::new(
        "verify",
        vec![
            Column::integer("rotation", "index of the sampled rotation"),
            Column::real("energy_change", "energy", "E(rotated gamma) - E(gamma)"),
        ],
    );
    let model = spec.model(spec.seed)?;
    let h = model.linear_hamiltonian()?;
    let pairs = model.interaction()?;
    let result = match solve(&h, &pairs, &model.config) {
        Ok(r) => r,
        Err(e) if e.is_configuration() => return Err(e),
        Err(e) => {
            table.fail(e);
            return Ok(table);
        }
    };
    record_solution(&mut table, &result);
    let options = VerifyOptions {
        rotations: spec.knobs.rotations,
        seed: spec.seed,
        ..VerifyOptions::default()
    };
    table.meta_real("rotation_angle", options.angle);
    let report = verify_solution(&result, &h, &pairs, &options)?;
    for (i, change) in report.rotation_energy_changes.iter().enumerate() {
        table.push_row(vec![Cell::from(i), (*change).into()]);
    }
    table.meta_real("projector_defect", report.projector_defect);
    table.meta_real("relative_commutator", report.relative_commutator);
    table.meta_real("verified_fixed_point_residual", report.fixed_point_residual);
    table.meta_real("trace_defect", report.trace_defect);
    table.meta_real("consistency_defect", report.consistency_defect);
    match &report.gap {
        Some(g) => {
            table.meta_real("gap_lower", g.lower);
            table.meta_real("gap_upper", g.upper);
        }
        None => table.meta("gap_lower", "none"),
    }
    table.meta_real("min_rotation_change", report.min_rotation_change());
    let passes = report.passes(VERIFY_TOLERANCE);
    table.meta("passes", passes);
    if !passes {
        table.fail(format!(
            "verification failed at tolerance {VERIFY_TOLERANCE:e}"
        ));
    }
    Ok(table)
}
