use super::observables::{eigenvector_spreads, uniform_stddev};
use super::table::{Cell, Column, ResultTable};
use super::{record_solution, ExperimentSpec};
use crate::error::Result;
use crate::stats::{mean, median};

pub const STDDEV_DEFINITION: &str =
    "sqrt(sum_x |x - m|^2 p(x)) with p = |psi|^2 and m = sum_x x p(x), x in lattice coordinates";

pub(crate) fn spread_columns() -> Vec<Column> {
    vec![
        Column::real("eigenvalue", "energy", "eigenvalue of H_min"),
        Column::real("stddev", "sites", STDDEV_DEFINITION),
        Column::real("ipr", "1", "inverse participation ratio sum_x p(x)^2"),
    ]
}

/// Position spread and participation of every eigenvector of `H_min`.
pub fn localisation_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let mut table = ResultTable::new("localisation", spread_columns());
    let model = spec.model(spec.seed)?;
    table.meta_real(
        "uniform_benchmark",
        uniform_stddev(spec.length, spec.dimension),
    );
    let result = match model.solve() {
        Ok(r) => r,
        Err(e) if e.is_configuration() => return Err(e),
        Err(e) => {
            table.fail(e);
            return Ok(table);
        }
    };
    record_solution(&mut table, &result);
    let spreads = eigenvector_spreads(&model.lattice, &result.spectrum);
    for &(e, s, ipr) in &spreads {
        table.push_row(vec![Cell::from(e), s.into(), ipr.into()]);
    }
    let stddevs: Vec<f64> = spreads.iter().map(|s| s.1).collect();
    table.meta_real("median_stddev", median(&stddevs));
    table.meta_real("mean_stddev", mean(&stddevs));
    Ok(table)
}
