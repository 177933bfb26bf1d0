use super::observables::{residual_decay_fit, worst_contraction_ratio};
use super::table::{Cell, Column, ResultTable};
use super::{record_solution, ExperimentSpec};
use crate::error::{Error, Result};
use crate::scf::{contraction_bound, solve, IterationRecord};
use crate::spectral::{eig_symmetric, find_gap, DEFAULT_GAP_THRESHOLD};

fn push_records(table: &mut ResultTable, records: &[IterationRecord]) {
    for r in records {
        table.push_row(vec![
            Cell::from(r.iteration),
            r.residual.into(),
            r.energy.into(),
        ]);
    }
}

/// One solve with its full residual trace.
pub fn convergence_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let mut table = ResultTable::new(
        "converge",
        vec![
            Column::integer("iteration", "solver step n, starting at 1"),
            Column::real("residual", "1", "operator norm of gamma_{n} - gamma_{n-1}"),
            Column::real("energy", "energy", "Hartree-Fock energy after step n"),
        ],
    );
    let model = spec.model(spec.seed)?;
    let h = model.linear_hamiltonian()?;
    let pairs = model.interaction()?;
    let l1 = model.kernel.l1_norm();
    table.meta_real("kernel_l1_norm", l1);
    let linear = eig_symmetric(h.matrix())?;
    match find_gap(&linear.values, None, DEFAULT_GAP_THRESHOLD) {
        Ok(gap) => {
            table.meta_real("linear_gap", gap.width);
            match contraction_bound(l1, gap.width) {
                Ok(kappa) => table.meta_real("contraction_bound", kappa),
                Err(e) => table.meta("contraction_bound", format!("n/a ({e})")),
            }
        }
        Err(e) => table.meta("linear_gap", format!("n/a ({e})")),
    }
    match solve(&h, &pairs, &model.config) {
        Ok(result) => {
            push_records(&mut table, &result.trace.records);
            record_solution(&mut table, &result);
            let residuals = result.trace.residuals();
            if let Some(fit) = residual_decay_fit(&residuals) {
                table.meta_real("log_residual_slope", fit.slope);
                table.meta_real("log_residual_r_squared", fit.r_squared);
                table.meta_real("mean_ratio", fit.slope.exp());
            }
            table.meta_real("worst_ratio", worst_contraction_ratio(&residuals));
        }
        Err(Error::MaxIterExceeded {
            iterations,
            residual,
            trace,
        }) => {
            push_records(&mut table, &trace.records);
            table.fail(format!(
                "no convergence after {iterations} iterations (residual {residual:e})"
            ));
        }
        Err(e) if e.is_configuration() => return Err(e),
        Err(e) => table.fail(e),
    }
    Ok(table)
}
